#include "rodhom/material.hpp"

#include <algorithm>
#include <cmath>

namespace rodhom {

namespace {


Mat6 symmetrise(const Mat6& c) { return 0.5 * (c + c.transpose()); }

}  // namespace

int voigt_index(int i, int j) {
    if (i == j) return i;
    if (i > j) std::swap(i, j);
    if (i == 1 && j == 2) return 3;
    if (i == 0 && j == 2) return 4;
    return 5;
}

Eigen::Matrix<double, 6, 1> to_engineering(const Mat3& e) {
    Eigen::Matrix<double, 6, 1> v;
    v << e(0, 0), e(1, 1), e(2, 2), e(1, 2) + e(2, 1), e(0, 2) + e(2, 0), e(0, 1) + e(1, 0);
    return v;
}

Mat3 stress_from_voigt(const Eigen::Matrix<double, 6, 1>& s) {
    Mat3 m;
    m << s(0), s(5), s(4), s(5), s(1), s(3), s(4), s(3), s(2);
    return m;
}

ElasticityTensor::ElasticityTensor() : c_(Mat6::Zero()) {}

ElasticityTensor ElasticityTensor::from_voigt(const Mat6& c) {
    ElasticityTensor t;
    t.c_ = symmetrise(c);
    return t;
}

double ElasticityTensor::operator()(int i, int j, int k, int l) const {
    return c_(voigt_index(i, j), voigt_index(k, l));
}

Mat3 ElasticityTensor::contract(const Mat3& e) const {
    return stress_from_voigt(c_ * to_engineering(0.5 * (e + e.transpose())));
}

double ElasticityTensor::symmetry_residual() const {
    double minor = 0.0, major = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) {
                    minor = std::max(minor, std::abs((*this)(i, j, k, l) - (*this)(j, i, k, l)));
                    major = std::max(major, std::abs((*this)(i, j, k, l) - (*this)(k, l, i, j)));
                }
    return minor + major;
}

ElasticityTensor make_isotropic(double lambda, double mu) {
    if (!(mu > 0.0) || !(3.0 * lambda + 2.0 * mu > 0.0))
        throw InvalidArgument("isotropic parameters are not positive definite");
    Mat6 c = Mat6::Zero();
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) c(a, b) = lambda;
        c(a, a) = lambda + 2.0 * mu;
        c(a + 3, a + 3) = mu;
    }
    return ElasticityTensor::from_voigt(c);
}

double check_coercivity(const ElasticityTensor& t) {
    // Quadratic form on symmetric matrices in an orthonormal basis: the
    // engineering shear coordinate is sqrt(2) times the orthonormal one.
    Eigen::Matrix<double, 6, 1> s;
    s << 1, 1, 1, std::sqrt(2.0), std::sqrt(2.0), std::sqrt(2.0);
    Mat6 q = s.asDiagonal() * t.voigt() * s.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Mat6> es(q);
    return es.eigenvalues()(0);
}

bool check_rod_material_symmetry(const ElasticityTensor& t, double tol) {
    for (int i = 0; i < 2; ++i) {
        if (std::abs(t(i, 2, 2, 2)) > tol) return false;
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                if (std::abs(t(i, j, k, 2)) > tol) return false;
    }
    return true;
}

MaterialProfile::MaterialProfile(std::vector<Layer> layers) : layers_(std::move(layers)) {
    if (layers_.empty()) throw InvalidArgument("material profile needs at least one layer");
    std::sort(layers_.begin(), layers_.end(),
              [](const Layer& a, const Layer& b) { return a.from < b.from; });
    const double tol = 1e-12;
    if (std::abs(layers_.front().from + 0.5) > tol || std::abs(layers_.back().to - 0.5) > tol)
        throw InvalidArgument("material layers must cover [-1/2, 1/2]");
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        if (!(layers_[i].to > layers_[i].from)) throw InvalidArgument("empty material layer");
        if (i + 1 < layers_.size() && std::abs(layers_[i].to - layers_[i + 1].from) > tol)
            throw InvalidArgument("material layers must be contiguous and disjoint");
    }
    layers_.front().from = -0.5;
    layers_.back().to = 0.5;
}

const ElasticityTensor& MaterialProfile::evaluate(double y) const {
    const double w = y - std::floor(y + 0.5);
    for (std::size_t i = 0; i + 1 < layers_.size(); ++i)
        if (w < layers_[i].to) return layers_[i].tensor;
    return layers_.back().tensor;
}

bool MaterialProfile::satisfies_rod_symmetry(double tol) const {
    return std::all_of(layers_.begin(), layers_.end(),
                       [tol](const Layer& l) { return check_rod_material_symmetry(l.tensor, tol); });
}

double MaterialProfile::min_coercivity() const {
    double nu = std::numeric_limits<double>::infinity();
    for (const auto& l : layers_) nu = std::min(nu, check_coercivity(l.tensor));
    return nu;
}

MaterialProfile homogeneous_profile(const ElasticityTensor& t) {
    return MaterialProfile({Layer{-0.5, 0.5, t}});
}

MaterialProfile two_phase_profile(double contrast) {
    return MaterialProfile({Layer{-0.5, 0.0, make_isotropic(1.0, 1.0)},
                            Layer{0.0, 0.5, make_isotropic(contrast, contrast)}});
}

MaterialProfile material_from_json(const nlohmann::json& j) {
    std::vector<Layer> layers;
    for (const auto& lj : j.at("layers")) {
        Layer l;
        l.from = lj.at("from").get<double>();
        l.to = lj.at("to").get<double>();
        const auto& model = lj.at("model");
        if (model.contains("isotropic")) {
            l.tensor = make_isotropic(model["isotropic"].at("lambda").get<double>(),
                                      model["isotropic"].at("mu").get<double>());
        } else if (model.contains("voigt")) {
            const auto& rows = model["voigt"];
            if (rows.size() != 6) throw InvalidArgument("voigt matrix must be 6x6");
            Mat6 c;
            for (int a = 0; a < 6; ++a) {
                if (rows[a].size() != 6) throw InvalidArgument("voigt matrix must be 6x6");
                for (int b = 0; b < 6; ++b) c(a, b) = rows[a][b].get<double>();
            }
            l.tensor = ElasticityTensor::from_voigt(c);
        } else {
            throw InvalidArgument("unknown material model");
        }
        layers.push_back(l);
    }
    return MaterialProfile(std::move(layers));
}

nlohmann::json material_to_json(const MaterialProfile& p) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& l : p.layers()) {
        nlohmann::json rows = nlohmann::json::array();
        for (int a = 0; a < 6; ++a) {
            nlohmann::json row = nlohmann::json::array();
            for (int b = 0; b < 6; ++b) row.push_back(l.tensor.voigt()(a, b));
            rows.push_back(row);
        }
        layers.push_back({{"from", l.from}, {"to", l.to}, {"model", {{"voigt", rows}}}});
    }
    return {{"layers", layers}};
}

std::string material_hash(const MaterialProfile& p) {
    std::uint64_t h = kFnvOffset;
    char buf[64];
    for (const auto& l : p.layers()) {
        std::snprintf(buf, sizeof buf, "[%.12e,%.12e):", l.from, l.to);
        fnv1a_feed(h, buf);
        for (int a = 0; a < 6; ++a)
            for (int b = 0; b < 6; ++b) {
                std::snprintf(buf, sizeof buf, "%.12e;", l.tensor.voigt()(a, b));
                fnv1a_feed(h, buf);
            }
    }
    return fnv1a_hex(h);
}

}  // namespace rodhom
