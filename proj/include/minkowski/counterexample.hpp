#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "minkowski/legendre_basis.hpp"
#include "minkowski/wigner.hpp"

namespace minkowski {

/// (k, alpha) of the family u_l = -l^{-2-alpha} sum_{i=0}^{l/32} v_{l+4i}, l = 2^k.
struct ConstructionParams {
    int k = 7;
    double alpha = 0.5;

    /// Throws PreconditionError unless 7 <= k <= 16 and 0 < alpha < 1.
    void validate() const;
    int ell() const { return 1 << k; }
    int count() const { return ell() / 32 + 1; }
    int degree(int i) const { return ell() + 4 * i; }
    double coefficient() const;
};

struct HarmonicTerm {
    int degree = 0;
    double coefficient = 0.0;
};

/// Finite Legendre series u(x) = sum_i c_i v_{l_i}(x).
class HarmonicSum {
public:
    HarmonicSum() = default;
    explicit HarmonicSum(std::vector<HarmonicTerm> terms, std::string label = "u");

    const std::vector<HarmonicTerm>& terms() const { return terms_; }
    const std::string& label() const { return label_; }
    bool empty() const { return terms_.empty(); }
    int max_degree() const;
    /// No degree-0 contribution, so int_S u = 0 exactly.
    bool has_zero_mean() const;
    /// Repeated degrees combined, sorted by degree, zero coefficients dropped.
    HarmonicSum merged() const;

    /// (u, u_t, u_tt) at t = x^3 from one Legendre recurrence pass.
    ProfileSample evaluate(double t) const;
    RadialProfile profile() const;

private:
    std::vector<HarmonicTerm> terms_;
    std::string label_ = "u";
};

/// The canonical family member for `params`.
HarmonicSum build_u(const ConstructionParams& params);

/// |u|_{W^{1,2}} = sqrt(int u^2 + |grad u|^2) from the zonal inner products.
double w12_norm(const HarmonicSum& u);

/// sup|u| + sup|grad u| by dense sampling.
double c1_norm(const HarmonicSum& u);

/// int_S (Lap u)^m for even m >= 2. m = 2 uses orthogonality; larger m use
/// quadrature exact for the polynomial degree m * L.
double delta_moment(const HarmonicSum& u, int m);

/// int_S (Lap u)^m through 3j path-lattice sums over all m-tuples of terms.
/// Throws BudgetExceeded when tuples x lattice size exceeds `work_budget`.
double delta_moment_lattice(const HarmonicSum& u, int m, double work_budget = 1e8);

struct CubicOptions {
    double triple_cap = 1e7;
    unsigned threads = 0;
};

/// (1/4pi) int_S |grad u|^2 Lap u as the triple sum
/// sum c1 c2 c3 (-1/2) L1 [L2 + L3 - L1] (3j)^2,  L = l (l + 1).
/// Partitioned over the first index; per-slot partial sums are reduced
/// pairwise in index order, so the result does not depend on the thread count.
double cubic_term_exact(const HarmonicSum& u, const CubicOptions& options = {});
double cubic_term_exact(const ConstructionParams& params, const CubicOptions& options = {});

/// Exact sum_{i1,i2,i3} L1 [L2 + L3 - L1] (3j)^2 for the canonical index set,
/// so cubic = 1/2 l^{-6-3 alpha} times this value.
Rational cubic_bracket_sum_exact(const ConstructionParams& params);

/// (1/4pi) int_S |grad u|^2 Lap u by Gauss-Legendre quadrature.
double cubic_term_quadrature(const HarmonicSum& u, std::optional<int> nodes = std::nullopt);

/// int_S Lap v_{l1} grad v_{l2} . grad v_{l3} by quadrature.
double triple_product_quadrature(int l1, int l2, int l3);
/// -1/2 L1 [L2 + L3 - L1] int_S v_{l1} v_{l2} v_{l3}, with the cubic integral from 3j.
double triple_product_closed_form(int l1, int l2, int l3);

struct BracketCheck {
    long long triples = 0;
    long long min_bracket = 0; // min over triples of L2 + L3 - L1
    long long bound = 0;       // l^2 / 2
    bool holds() const { return min_bracket >= bound; }
};

/// Exhaustive check of L_{i2} + L_{i3} - L_{i1} >= l^2/2 over the index set.
BracketCheck check_bracket(const ConstructionParams& params);

struct AnalysisOptions {
    std::vector<int> moments{2, 4};
    CubicOptions cubic{};
    bool cubic_quadrature = true;
};

/// One row of the (k, alpha) sweep.
struct SweepRow {
    int k = 0;
    double alpha = 0.0;
    int ell = 0;
    double w12_norm = 0.0;
    double c1_norm = 0.0;
    std::vector<std::pair<int, double>> delta_moments;
    double cubic_exact = 0.0;
    std::optional<double> cubic_quadrature;
    double cubic_scaled = 0.0; // l^{1+3 alpha} int_S |grad u|^2 Lap u
    double area_defect = 0.0;
    double deficit = 0.0;
    double deficit_scaled = 0.0; // M l^{1+3 alpha}
    double traceless_energy = 0.0;
    double remainder_ratio_half = 0.0; // kappa = 1/2
    double remainder_ratio_one = 0.0;  // kappa = 1
    /// -(M(u) - M(-u)) / (2 int |grad u|^2 Lap u): the cubic Taylor coefficient
    /// of M measured against the cubic integral.
    double kappa_estimate = 0.0;
};

/// Remainder |M + kappa int |grad u|^2 Lap u| / (l^{-2-2 alpha} + l^{-1-4 alpha}).
double remainder_ratio(double deficit, double cubic_integral, double kappa, int ell, double alpha);

/// Full row for the canonical family member.
SweepRow deficit_analysis(const ConstructionParams& params, const AnalysisOptions& options = {});
/// Row for an arbitrary zero-mean sum, reported at scale l = 2^k.
SweepRow analyze_sum(const HarmonicSum& u, int k, double alpha, const AnalysisOptions& options = {});

/// Sweep CSV schema version; bump whenever columns change.
inline constexpr int kSweepSchemaVersion = 1;

/// Columns: version,k,alpha,ell,w12_norm,c1_norm,delta_moment_<m>...,cubic_exact,
/// cubic_quadrature,cubic_scaled,area_defect,deficit,deficit_scaled,
/// traceless_energy,remainder_ratio_half,remainder_ratio_one,kappa_estimate
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
std::string sweep_to_json(const std::vector<SweepRow>& rows);

} // namespace minkowski
