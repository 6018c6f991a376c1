#pragma once

#include <vector>

#include <json.hpp>

#include "rodhom/common.hpp"

namespace rodhom {

// Stiffness tensor stored as a 6x6 matrix in the order (11,22,33,23,13,12)
// acting on engineering strains (shear entries doubled), so that
// e^T C e = A E : E and C_IJ = A_ijkl for the corresponding index pairs.
class ElasticityTensor {
public:
    ElasticityTensor();
    static ElasticityTensor from_voigt(const Mat6& c);

    const Mat6& voigt() const { return c_; }
    double operator()(int i, int j, int k, int l) const;  // 0-based indices
    Mat3 contract(const Mat3& e) const;                    // A E for symmetric E
    double symmetry_residual() const;

private:
    Mat6 c_;
};

int voigt_index(int i, int j);
Eigen::Matrix<double, 6, 1> to_engineering(const Mat3& e);
Mat3 stress_from_voigt(const Eigen::Matrix<double, 6, 1>& s);

ElasticityTensor make_isotropic(double lambda, double mu);
double check_coercivity(const ElasticityTensor& t);
bool check_rod_material_symmetry(const ElasticityTensor& t, double tol);

struct Layer {
    double from = -0.5;
    double to = 0.5;
    ElasticityTensor tensor;
};

class MaterialProfile {
public:
    MaterialProfile() = default;
    explicit MaterialProfile(std::vector<Layer> layers);

    const ElasticityTensor& evaluate(double y) const;
    const std::vector<Layer>& layers() const { return layers_; }
    bool satisfies_rod_symmetry(double tol = 1e-12) const;
    double min_coercivity() const;

private:
    std::vector<Layer> layers_;
};

MaterialProfile homogeneous_profile(const ElasticityTensor& t);
// Two isotropic phases: lambda = mu = 1 on [-1/2, 0) and scaled by contrast on [0, 1/2).
MaterialProfile two_phase_profile(double contrast);

MaterialProfile material_from_json(const nlohmann::json& j);
nlohmann::json material_to_json(const MaterialProfile& p);
std::string material_hash(const MaterialProfile& p);

}  // namespace rodhom
