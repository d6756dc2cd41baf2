#include "minkowski/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>

#include <json.hpp>

#include "minkowski/errors.hpp"
#include "minkowski/graph_geometry.hpp"
#include "minkowski/parallel.hpp"
#include "minkowski/quadrature.hpp"

namespace minkowski {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

double eigenvalue(int l) { return static_cast<double>(l) * (l + 1); }

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void ConstructionParams::validate() const {
    if (k < 7)
        throw PreconditionError("construction needs k >= 7, got " + std::to_string(k));
    if (k > 16)
        throw PreconditionError("k above 16 exceeds the float 3j table, got " + std::to_string(k));
    if (!(alpha > 0.0 && alpha < 1.0))
        throw PreconditionError("alpha must lie in (0, 1)");
}

double ConstructionParams::coefficient() const { return -std::pow(static_cast<double>(ell()), -2.0 - alpha); }

HarmonicSum::HarmonicSum(std::vector<HarmonicTerm> terms, std::string label)
    : terms_(std::move(terms)), label_(std::move(label)) {
    for (const auto& t : terms_)
        if (t.degree < 0)
            throw PreconditionError("harmonic degree must be non-negative");
}

int HarmonicSum::max_degree() const {
    int L = 0;
    for (const auto& t : terms_)
        L = std::max(L, t.degree);
    return L;
}

bool HarmonicSum::has_zero_mean() const {
    double c0 = 0.0;
    for (const auto& t : terms_)
        if (t.degree == 0)
            c0 += t.coefficient;
    return c0 == 0.0;
}

HarmonicSum HarmonicSum::merged() const {
    std::map<int, double> by_degree;
    for (const auto& t : terms_)
        by_degree[t.degree] += t.coefficient;
    std::vector<HarmonicTerm> out;
    for (const auto& [d, c] : by_degree)
        if (c != 0.0)
            out.push_back({d, c});
    return HarmonicSum(std::move(out), label_);
}

ProfileSample HarmonicSum::evaluate(double t) const {
    if (terms_.empty())
        return {};
    thread_local LegendreTable table;
    table.fill(max_degree(), -t);
    ProfileSample s;
    CompensatedSum v, d1, d2;
    for (const auto& term : terms_) {
        const auto i = static_cast<std::size_t>(term.degree);
        v.add(term.coefficient * table.p[i]);
        d1.add(-term.coefficient * table.dp[i]);
        d2.add(term.coefficient * table.d2p[i]);
    }
    return {v.value(), d1.value(), d2.value()};
}

RadialProfile HarmonicSum::profile() const {
    auto self = std::make_shared<const HarmonicSum>(*this);
    return RadialProfile([self](double t) { return self->evaluate(t); }, max_degree(), label_);
}

HarmonicSum build_u(const ConstructionParams& params) {
    params.validate();
    const double c = params.coefficient();
    std::vector<HarmonicTerm> terms;
    terms.reserve(static_cast<std::size_t>(params.count()));
    for (int i = 0; i < params.count(); ++i)
        terms.push_back({params.degree(i), c});
    return HarmonicSum(std::move(terms),
                       "u(k=" + std::to_string(params.k) + ",alpha=" + fmt(params.alpha) + ")");
}

double w12_norm(const HarmonicSum& u) {
    CompensatedSum acc;
    const auto merged = u.merged();
    for (const auto& t : merged.terms())
        acc.add(t.coefficient * t.coefficient * kFourPi * (1.0 + eigenvalue(t.degree)) / (2.0 * t.degree + 1.0));
    return std::sqrt(acc.value());
}

double c1_norm(const HarmonicSum& u) {
    if (u.empty())
        return 0.0;
    return sup_norms(u.profile(), u.max_degree()).c1();
}

double delta_moment(const HarmonicSum& u, int m) {
    if (m < 2 || m % 2 != 0)
        throw PreconditionError("delta_moment needs an even m >= 2, got " + std::to_string(m));
    if (u.empty())
        return 0.0;
    if (m == 2) {
        CompensatedSum acc;
        const auto merged = u.merged();
        for (const auto& t : merged.terms()) {
            const double lam = eigenvalue(t.degree);
            acc.add(t.coefficient * t.coefficient * kFourPi * lam * lam / (2.0 * t.degree + 1.0));
        }
        return acc.value();
    }
    const auto& rule = gauss_rule(nodes_for(m, u.max_degree()));
    return sphere_integrate([&](double t) { return std::pow(axisym_laplacian(u.evaluate(t), t), m); }, rule,
                            m * u.max_degree());
}

double delta_moment_lattice(const HarmonicSum& u, int m, double work_budget) {
    if (m < 2 || m % 2 != 0)
        throw PreconditionError("delta_moment needs an even m >= 2, got " + std::to_string(m));
    const auto terms = u.merged().terms();
    const std::size_t n = terms.size();
    if (n == 0)
        return 0.0;
    const double tuples = std::pow(static_cast<double>(n), m);
    std::vector<int> worst(static_cast<std::size_t>(m - 1), u.max_degree());
    const double work = tuples * PathLattice(worst).size();
    if (work > work_budget)
        throw BudgetExceeded("delta_moment_lattice work", work, work_budget);

    std::vector<std::size_t> index(static_cast<std::size_t>(m), 0);
    std::vector<int> degrees(static_cast<std::size_t>(m));
    CompensatedSum acc;
    while (true) {
        double weight = 1.0;
        for (int j = 0; j < m; ++j) {
            const auto& t = terms[index[static_cast<std::size_t>(j)]];
            degrees[static_cast<std::size_t>(j)] = t.degree;
            weight *= -eigenvalue(t.degree) * t.coefficient;
        }
        acc.add(weight * m_product_integral_float(degrees, 1e300));
        std::size_t pos = 0;
        while (pos < index.size() && ++index[pos] == n)
            index[pos++] = 0;
        if (pos == index.size())
            break;
    }
    return kFourPi * acc.value();
}

double cubic_term_exact(const HarmonicSum& u, const CubicOptions& options) {
    const auto terms = u.merged().terms();
    const std::size_t n = terms.size();
    const double triples = static_cast<double>(n) * n * n;
    if (triples > options.triple_cap)
        throw BudgetExceeded("cubic_term_exact triples", triples, options.triple_cap);

    std::vector<double> partial(n, 0.0);
    parallel_for(n, options.threads, [&](std::size_t i1) {
        const int l1 = terms[i1].degree;
        const double lam1 = eigenvalue(l1);
        CompensatedSum acc;
        for (std::size_t i2 = 0; i2 < n; ++i2) {
            const int l2 = terms[i2].degree;
            const double lam2 = eigenvalue(l2);
            const double c2 = terms[i2].coefficient;
            for (std::size_t i3 = 0; i3 < n; ++i3) {
                const int l3 = terms[i3].degree;
                const double sq = threej_square_float(l1, l2, l3);
                if (sq == 0.0)
                    continue;
                acc.add(c2 * terms[i3].coefficient * (lam2 + eigenvalue(l3) - lam1) * sq);
            }
        }
        partial[i1] = -0.5 * terms[i1].coefficient * lam1 * acc.value();
    });
    return pairwise_sum(partial);
}

double cubic_term_exact(const ConstructionParams& params, const CubicOptions& options) {
    return cubic_term_exact(build_u(params), options);
}

Rational cubic_bracket_sum_exact(const ConstructionParams& params) {
    params.validate();
    Rational total = 0;
    const int n = params.count();
    for (int i1 = 0; i1 < n; ++i1) {
        const int l1 = params.degree(i1);
        const mpz_class lam1 = mpz_class(l1) * (l1 + 1);
        for (int i2 = 0; i2 < n; ++i2) {
            const int l2 = params.degree(i2);
            for (int i3 = 0; i3 < n; ++i3) {
                const int l3 = params.degree(i3);
                const auto tj = threej_zero(l1, l2, l3);
                if (tj.is_zero())
                    continue;
                const mpz_class bracket = mpz_class(l2) * (l2 + 1) + mpz_class(l3) * (l3 + 1) - lam1;
                total += Rational(lam1 * bracket) * tj.square;
            }
        }
    }
    total.canonicalize();
    return total;
}

double cubic_term_quadrature(const HarmonicSum& u, std::optional<int> nodes) {
    if (u.empty())
        return 0.0;
    const int L = u.max_degree();
    const auto& rule = gauss_rule(nodes.value_or(nodes_for(3, L)));
    const double integral = sphere_integrate(
        [&](double t) {
            const auto s = u.evaluate(t);
            return axisym_grad_sq(s, t) * axisym_laplacian(s, t);
        },
        rule, 3 * L);
    return integral / kFourPi;
}

double triple_product_quadrature(int l1, int l2, int l3) {
    const auto& rule = gauss_rule(nodes_for(3, std::max({l1, l2, l3, 1})));
    return sphere_integrate(
        [&](double t) {
            const auto a = legendre_eval(l1, -t);
            const auto b = legendre_eval(l2, -t);
            const auto c = legendre_eval(l3, -t);
            const double x = 1.0 - t * t;
            // v(t) = P(-t): v' = -P'(-t), v'' = P''(-t)
            const double lap1 = x * a.d2 + 2.0 * t * a.d1;
            return lap1 * x * b.d1 * c.d1;
        },
        rule);
}

double triple_product_closed_form(int l1, int l2, int l3) {
    const std::array<int, 3> d{l1, l2, l3};
    const double cubic = kFourPi * m_product_integral(d).get_d();
    return -0.5 * eigenvalue(l1) * (eigenvalue(l2) + eigenvalue(l3) - eigenvalue(l1)) * cubic;
}

BracketCheck check_bracket(const ConstructionParams& params) {
    params.validate();
    BracketCheck out;
    const long long ell = params.ell();
    out.bound = ell * ell / 2;
    out.min_bracket = std::numeric_limits<long long>::max();
    auto lam = [](long long l) { return l * (l + 1); };
    const int n = params.count();
    for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2)
            for (int i3 = 0; i3 < n; ++i3) {
                const long long b = lam(params.degree(i2)) + lam(params.degree(i3)) - lam(params.degree(i1));
                out.min_bracket = std::min(out.min_bracket, b);
                ++out.triples;
            }
    return out;
}

double remainder_ratio(double deficit, double cubic_integral, double kappa, int ell, double alpha) {
    const double l = ell;
    const double scale = std::pow(l, -2.0 - 2.0 * alpha) + std::pow(l, -1.0 - 4.0 * alpha);
    return std::abs(deficit + kappa * cubic_integral) / scale;
}

SweepRow analyze_sum(const HarmonicSum& u, int k, double alpha, const AnalysisOptions& options) {
    if (!u.has_zero_mean())
        throw PreconditionError("analysis requires a zero-mean profile");
    SweepRow row;
    row.k = k;
    row.alpha = alpha;
    row.ell = 1 << k;
    row.w12_norm = w12_norm(u);
    row.c1_norm = c1_norm(u);
    for (int m : options.moments)
        row.delta_moments.emplace_back(m, delta_moment(u, m));
    row.cubic_exact = cubic_term_exact(u, options.cubic);
    if (options.cubic_quadrature)
        row.cubic_quadrature = cubic_term_quadrature(u);

    const double scale = std::pow(static_cast<double>(row.ell), 1.0 + 3.0 * alpha);
    const double cubic_integral = kFourPi * row.cubic_exact;
    row.cubic_scaled = scale * cubic_integral;

    if (!u.empty()) {
        const auto profile = u.profile();
        check_graph_condition(profile);
        const auto report = surface_report(profile, gauss_rule(surface_rule_size(u.max_degree())));
        row.area_defect = report.area - kFourPi;
        row.deficit = report.deficit;
        row.traceless_energy = report.traceless_energy;

        std::vector<HarmonicTerm> negated;
        for (const auto& t : u.terms())
            negated.push_back({t.degree, -t.coefficient});
        const auto mirror = surface_report(HarmonicSum(std::move(negated)).profile(),
                                           gauss_rule(surface_rule_size(u.max_degree())));
        if (cubic_integral != 0.0)
            row.kappa_estimate = -(report.deficit - mirror.deficit) / (2.0 * cubic_integral);
    }
    row.deficit_scaled = scale * row.deficit;
    row.remainder_ratio_half = remainder_ratio(row.deficit, cubic_integral, 0.5, row.ell, alpha);
    row.remainder_ratio_one = remainder_ratio(row.deficit, cubic_integral, 1.0, row.ell, alpha);
    return row;
}

SweepRow deficit_analysis(const ConstructionParams& params, const AnalysisOptions& options) {
    return analyze_sum(build_u(params), params.k, params.alpha, options);
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    std::vector<int> moments;
    if (!rows.empty())
        for (const auto& [m, v] : rows.front().delta_moments)
            moments.push_back(m);

    out << "version,k,alpha,ell,w12_norm,c1_norm";
    for (int m : moments)
        out << ",delta_moment_" << m;
    out << ",cubic_exact,cubic_quadrature,cubic_scaled,area_defect,deficit,deficit_scaled,"
           "traceless_energy,remainder_ratio_half,remainder_ratio_one,kappa_estimate\n";
    for (const auto& r : rows) {
        out << kSweepSchemaVersion << ',' << r.k << ',' << fmt(r.alpha) << ',' << r.ell << ','
            << fmt(r.w12_norm) << ',' << fmt(r.c1_norm);
        for (const auto& [m, v] : r.delta_moments)
            out << ',' << fmt(v);
        out << ',' << fmt(r.cubic_exact) << ',' << (r.cubic_quadrature ? fmt(*r.cubic_quadrature) : "")
            << ',' << fmt(r.cubic_scaled) << ',' << fmt(r.area_defect) << ',' << fmt(r.deficit) << ','
            << fmt(r.deficit_scaled) << ',' << fmt(r.traceless_energy) << ',' << fmt(r.remainder_ratio_half)
            << ',' << fmt(r.remainder_ratio_one) << ',' << fmt(r.kappa_estimate) << '\n';
    }
}

std::string sweep_to_json(const std::vector<SweepRow>& rows) {
    nlohmann::ordered_json doc;
    doc["version"] = kSweepSchemaVersion;
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json j;
        j["k"] = r.k;
        j["alpha"] = r.alpha;
        j["ell"] = r.ell;
        j["w12_norm"] = r.w12_norm;
        j["c1_norm"] = r.c1_norm;
        for (const auto& [m, v] : r.delta_moments)
            j["delta_moment_" + std::to_string(m)] = v;
        j["cubic_exact"] = r.cubic_exact;
        j["cubic_quadrature"] = r.cubic_quadrature ? nlohmann::ordered_json(*r.cubic_quadrature) : nullptr;
        j["cubic_scaled"] = r.cubic_scaled;
        j["area_defect"] = r.area_defect;
        j["deficit"] = r.deficit;
        j["deficit_scaled"] = r.deficit_scaled;
        j["traceless_energy"] = r.traceless_energy;
        j["remainder_ratio_half"] = r.remainder_ratio_half;
        j["remainder_ratio_one"] = r.remainder_ratio_one;
        j["kappa_estimate"] = r.kappa_estimate;
        doc["rows"].push_back(std::move(j));
    }
    return doc.dump(2);
}

} // namespace minkowski
