#include "degenera/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "degenera/calculus.hpp"
#include "degenera/cutoff.hpp"
#include "degenera/fem.hpp"
#include "degenera/rng.hpp"
#include "degenera/weights.hpp"

namespace degenera {

static const char* kVersion = "degenera 0.1.0";

// ---------------------------------------------------------------------------
// emit helpers

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    fs::path tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, p);
}

std::string CsvTable::to_text() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// config -> objects

RunConfig RunConfig::from_config(Config cfg, const std::string& out_override,
                                 const std::string& seed_override) {
    RunConfig rc;
    rc.command = cfg.get_string("command");
    static const char* known[] = {"verify", "density", "inequality", "poincare", "solve",
                                  "example8"};
    bool ok = false;
    for (const char* k : known)
        if (rc.command == k) ok = true;
    if (!ok) throw ConfigError("unknown command `" + rc.command + "`");
    if (!seed_override.empty()) cfg.set("seed", seed_override);
    if (!out_override.empty()) cfg.set("output_dir", out_override);
    rc.seed = static_cast<std::uint64_t>(cfg.get_int_or("seed", 1));
    rc.output_dir = cfg.get_string_or("output_dir", "out");
    rc.config = std::move(cfg);
    return rc;
}

namespace {

WeightFunction weight_from_config(const Config& cfg, const std::string& prefix) {
    std::string kind = cfg.get_string_or(prefix + "kind", "one");
    int d = static_cast<int>(cfg.get_int_or(prefix + "dimension", 1));
    int m = static_cast<int>(cfg.get_int_or(prefix + "m", 2));
    WeightFunction v;
    if (kind == "radial_power") {
        v = WeightFunction::radial_power(cfg.get_number(prefix + "exponent"), d, m);
    } else if (kind == "one") {
        v = WeightFunction::one(d);
    } else if (kind == "affine_trig") {
        v = WeightFunction::affine_trig(cfg.get_number_or(prefix + "a", 4.0),
                                        cfg.get_number_or(prefix + "b", 1.0),
                                        cfg.get_number_or(prefix + "c", 0.25), m);
    } else if (kind == "grid_sampled") {
        std::vector<double> xs = cfg.get_list_or(prefix + "nodes", {});
        std::vector<double> vs = cfg.get_list_or(prefix + "values", {});
        v = WeightFunction::grid_sampled(xs, vs);
    } else {
        throw ConfigError("unknown weight kind `" + kind + "`");
    }
    std::string zs = cfg.get_string_or(prefix + "zero_set", "");
    if (zs == "none")
        v.zero_set.kind = ZeroSet::Kind::none;
    else if (zs == "origin")
        v.zero_set.kind = ZeroSet::Kind::origin;
    else if (!zs.empty())
        throw ConfigError("unknown zero_set `" + zs + "` (use none|origin)");
    return v;
}

Domain domain_from_config(const Config& cfg) {
    std::string kind = cfg.get_string_or("domain.kind", "interval");
    if (kind == "interval")
        return Domain::interval(cfg.get_number_or("domain.a", -1.0),
                                cfg.get_number_or("domain.b", 1.0));
    if (kind == "disk") return Domain::disk(cfg.get_number_or("domain.radius", 1.0));
    if (kind == "square")
        return Domain::square(cfg.get_number_or("domain.a", 0.0),
                              cfg.get_number_or("domain.b", 1.0));
    throw ConfigError("unknown domain kind `" + kind + "`");
}

std::string report_text(const RunConfig& rc,
                        const std::vector<std::pair<std::string, std::string>>& outcomes,
                        const std::string& verdict) {
    std::ostringstream os;
    os << "degenera run report\n";
    os << "version: " << kVersion << "\n";
    os << "command: " << rc.command << "\n";
    os << "config:\n";
    for (const auto& [k, v] : rc.config.entries()) os << "  " << k << " = " << v << "\n";
    os << "outcomes:\n";
    for (const auto& [k, v] : outcomes) os << "  " << k << ": " << v << "\n";
    os << "verdict: " << verdict << "\n";
    return os.str();
}

void finish(RunReport& rep, const RunConfig& rc, const std::string& verdict, int code) {
    rep.verdict = verdict;
    rep.exit_code = code;
    write_text_atomic(rc.output_dir + "/report.txt", report_text(rc, rep.outcomes, verdict));
}

std::string yn(bool b) { return b ? "true" : "false"; }

// ---------------------------------------------------------------------------
// verify

ScalarField inverse_square_field() {
    ScalarField f;
    f.evaluator = [](const Point& p) { return 1.0 / (p[0] * p[0]); };
    f.declared_derivatives[MultiIndex::unit(1, 0)] = [](const Point& p) {
        return -2.0 / (p[0] * p[0] * p[0]);
    };
    f.singular_points.push_back({0.0, 0.0});
    return f;
}

RunReport verify_pipeline(const RunConfig& rc) {
    RunReport rep;
    rep.command = rc.command;
    const Config& cfg = rc.config;
    std::string which = cfg.get_string_or("case", "inverse_square");
    double tol = cfg.get_number_or("tolerance.residual", 1e-6);
    Domain dom = domain_from_config(cfg);
    int cells = static_cast<int>(cfg.get_int_or("mesh.cells", 48));
    double grading = cfg.get_number_or("mesh.grading", 3.0);
    Mesh mesh = build_interval_mesh(dom.a, dom.b, cells, grading, 0.0, true);
    QuadratureRule rule = QuadratureRule::gauss(static_cast<int>(cfg.get_int_or("quadrature.order", 5)));
    TestFunctionBattery battery = build_battery(mesh, dom, 2);

    WeightFunction v = cfg.has("weight.kind") ? weight_from_config(cfg, "weight.")
                                              : WeightFunction::radial_power(2.0, 1, 2);
    MultiIndex e1 = MultiIndex::unit(1, 0);

    CsvTable csv;
    csv.header = {"kind", "alpha", "residual", "scale", "relative", "holds"};
    bool all_ok = true;
    std::string first_fail;
    auto add_row = [&](const std::string& kind, int alpha, const ResidualReport& r, double tol_row,
                       bool expect_pass) {
        bool ok = r.relative <= tol_row;
        csv.rows.push_back({kind, std::to_string(alpha), format_g17(r.residual),
                            format_g17(r.scale), format_g17(r.relative), yn(ok)});
        rep.outcomes.push_back({kind + " relative", format_g17(r.relative)});
        if (expect_pass && !ok) {
            all_ok = false;
            if (first_fail.empty()) first_fail = kind;
        }
        return ok;
    };

    if (which == "inverse_square" || which == "wrong_sign") {
        ScalarField f = inverse_square_field();
        ScalarField g;
        double sign = which == "wrong_sign" ? -1.0 : 1.0;
        g.evaluator = [sign](const Point& p) { return sign * -2.0 / (p[0] * p[0] * p[0]); };
        g.singular_points.push_back({0.0, 0.0});
        ResidualReport wd = weak_derivative_residual(f, g, v, e1, battery, mesh, rule);
        if (which == "wrong_sign") {
            bool detected = wd.relative >= 0.1;
            csv.rows.push_back({"weak_derivative_wrong_sign", "1", format_g17(wd.residual),
                                format_g17(wd.scale), format_g17(wd.relative), yn(!detected)});
            rep.outcomes.push_back({"wrong_sign relative", format_g17(wd.relative)});
            write_text_atomic(rc.output_dir + "/residuals.csv", csv.to_text());
            if (detected)
                finish(rep, rc, "fail: weak-derivative identity rejected the wrong-sign candidate", 2);
            else
                finish(rep, rc, "error: wrong-sign candidate was not detected", 1);
            return rep;
        }
        add_row("weak_derivative", 1, wd, tol, true);
        ResidualReport lz = leibniz_residual(f, v, 1, e1, battery, mesh, rule);
        add_row("leibniz", 1, lz, tol, true);

        ScalarField h = inverse_square_field();
        BumpFunction bump;
        bump.center = {0.31 * (dom.b - dom.a) / 2 + (dom.a + dom.b) / 2, 0.0};
        bump.radius = {0.35 * (dom.b - dom.a) / 2, 1.0};
        bump.dimension = 1;
        ScalarField fb;
        fb.evaluator = [bump](const Point& p) { return bump.value(p); };
        fb.declared_derivatives[e1] = [bump, e1](const Point& p) {
            return bump.derivative(e1, p);
        };
        MultiplierField a;
        a.a_tilde = ScalarField::constant(1.0, 1);
        a.power = 3;
        ResidualReport ib = ibp_residual(h, fb, a, v, e1, mesh, rule);
        add_row("ibp", 1, ib, tol, true);
    } else if (which == "smooth") {
        ScalarField f;
        f.evaluator = [](const Point& p) { return std::sin(p[0]); };
        f.declared_derivatives[e1] = [](const Point& p) { return std::cos(p[0]); };
        ScalarField g;
        g.evaluator = [](const Point& p) { return std::cos(p[0]); };
        ResidualReport wd = weak_derivative_residual(f, g, v, e1, battery, mesh, rule);
        add_row("weak_derivative", 1, wd, tol, true);
        MultiIndex e2({2});
        ScalarField g2;
        g2.evaluator = [](const Point& p) { return -std::sin(p[0]); };
        ResidualReport wd2 = weak_derivative_residual(f, g2, v, e2, battery, mesh, rule);
        add_row("weak_derivative", 2, wd2, tol, true);
        ResidualReport lz = leibniz_residual(f, v, 1, e1, battery, mesh, rule);
        add_row("leibniz", 1, lz, tol, true);
        ScalarField h;
        h.evaluator = [](const Point& p) { return std::sin(2.0 * p[0]); };
        h.declared_derivatives[e1] = [](const Point& p) { return 2.0 * std::cos(2.0 * p[0]); };
        BumpFunction bump;
        bump.center = {-0.2, 0.0};
        bump.radius = {0.5, 1.0};
        bump.dimension = 1;
        ScalarField fb;
        fb.evaluator = [bump](const Point& p) { return bump.value(p); };
        fb.declared_derivatives[e1] = [bump, e1](const Point& p) {
            return bump.derivative(e1, p);
        };
        MultiplierField a;
        a.a_tilde = ScalarField::constant(1.0, 1);
        a.power = 3;
        ResidualReport ib = ibp_residual(h, fb, a, v, e1, mesh, rule);
        add_row("ibp", 1, ib, tol, true);
    } else if (which == "boundary_violation") {
        ScalarField h;
        h.evaluator = [](const Point& p) { return std::sin(2.0 * p[0]); };
        h.declared_derivatives[e1] = [](const Point& p) { return 2.0 * std::cos(2.0 * p[0]); };
        ScalarField f; // does not vanish on the boundary: outside the null-trace class
        f.evaluator = [](const Point& p) { return 1.0 + 0.5 * p[0]; };
        f.declared_derivatives[e1] = [](const Point&) { return 0.5; };
        MultiplierField a;
        a.a_tilde = ScalarField::constant(1.0, 1);
        a.power = 3;
        ResidualReport ib = ibp_residual(h, f, a, v, e1, mesh, rule);
        bool detected = ib.relative >= 1e-3;
        csv.rows.push_back({"ibp_boundary_violation", "1", format_g17(ib.residual),
                            format_g17(ib.scale), format_g17(ib.relative), yn(!detected)});
        rep.outcomes.push_back({"ibp boundary-term relative", format_g17(ib.relative)});
        write_text_atomic(rc.output_dir + "/residuals.csv", csv.to_text());
        if (detected)
            finish(rep, rc,
                   "fail: IBP lemma null-trace hypothesis violated (boundary term detected)", 2);
        else
            finish(rep, rc, "error: boundary violation was not detected", 1);
        return rep;
    } else {
        throw ConfigError("unknown verify case `" + which + "`");
    }

    write_text_atomic(rc.output_dir + "/residuals.csv", csv.to_text());
    if (all_ok)
        finish(rep, rc, "pass", 0);
    else
        finish(rep, rc, "fail: identity residual above tolerance (" + first_fail + ")", 2);
    return rep;
}

// ---------------------------------------------------------------------------
// density

RunReport density_pipeline(const RunConfig& rc) {
    RunReport rep;
    rep.command = rc.command;
    const Config& cfg = rc.config;
    WeightFunction v = cfg.has("weight.kind") ? weight_from_config(cfg, "weight.")
                                              : WeightFunction::radial_power(1.0, 1, 2);
    Domain dom = domain_from_config(cfg);
    std::vector<int> n_list = cfg.get_int_list_or("n_list", {4, 8, 16, 32, 64});
    double p = cfg.get_number_or("p", 2.0);
    int cells = static_cast<int>(cfg.get_int_or("mesh.cells", 128));
    double ratio_max = cfg.get_number_or("density.ratio_max", 0.5);
    Mesh mesh = build_interval_mesh(dom.a, dom.b, cells, 3.0, 0.0, true);
    QuadratureRule rule = QuadratureRule::gauss(5);

    ShapeMap s1 = ShapeMap::absolute(1, 1);
    WeightFamily family = WeightFamily::standard(v, s1, p);
    CutoffFamily fam;
    fam.profile = build_transition(2);
    fam.v = v;
    MultiIndex e1 = MultiIndex::unit(1, 0);

    CsvTable csv;
    csv.header = {"n", "w_norm", "ratio_prev"};
    std::vector<double> norms;
    for (int n : n_list) {
        fam.n = n;
        ScalarField fn;
        fn.evaluator = [&fam](const Point& x) {
            return 1.0 - chi_eval(fam, x, MultiIndex::zero(1));
        };
        fn.declared_derivatives[e1] = [&fam, e1](const Point& x) {
            return -chi_eval(fam, x, e1);
        };
        double nrm = sobolev_norm(fn, family, p, mesh, rule);
        double ratio = norms.empty() ? std::numeric_limits<double>::quiet_NaN()
                                     : nrm / norms.back();
        csv.rows.push_back({std::to_string(n), format_g17(nrm), format_g17(ratio)});
        norms.push_back(nrm);
    }
    write_text_atomic(rc.output_dir + "/density_norms.csv", csv.to_text());

    CsvTable fitcsv;
    fitcsv.header = {"sigma_order", "fitted_exponent", "C"};
    ShapeMap s2 = ShapeMap::absolute(1, 2);
    for (int order : {1, 2}) {
        MultiIndex sigma(std::vector<int>{order});
        GrowthFit fit = chi_growth_fit(v, s2, sigma, n_list, dom);
        fitcsv.rows.push_back({std::to_string(order), format_g17(fit.fitted_exponent),
                               format_g17(fit.C)});
        rep.outcomes.push_back(
            {"growth exponent |sigma|=" + std::to_string(order), format_g17(fit.fitted_exponent)});
    }
    write_text_atomic(rc.output_dir + "/growth_fit.csv", fitcsv.to_text());

    bool decreasing = true;
    for (std::size_t i = 1; i < norms.size(); ++i)
        if (!(norms[i] < norms[i - 1])) decreasing = false;
    bool contracted = !norms.empty() && norms.back() <= ratio_max * norms.front();
    rep.outcomes.push_back({"norms decreasing", yn(decreasing)});
    rep.outcomes.push_back({"final/initial", format_g17(norms.back() / norms.front())});
    if (decreasing && contracted)
        finish(rep, rc, "pass", 0);
    else
        finish(rep, rc, "fail: cutoff density decrease not observed", 2);
    return rep;
}

// ---------------------------------------------------------------------------
// inequality

RunReport inequality_pipeline(const RunConfig& rc) {
    RunReport rep;
    rep.command = rc.command;
    const Config& cfg = rc.config;
    std::string kind = cfg.get_string("kind");
    double p = cfg.get_number_or("p", 2.0);
    int d = static_cast<int>(cfg.get_int_or("d", 2));
    int samples = static_cast<int>(cfg.get_int_or("samples", 100));
    double R = cfg.get_number_or("R", 1.0);
    CounterRng rng(rc.seed);

    CsvTable csv;
    csv.header = {"index", "kind", "p", "d", "sigma", "constant", "lhs", "rhs", "margin", "holds"};
    bool all_hold = true;

    auto push_row = [&](int idx, const MarginReport& m, double sigma) {
        csv.rows.push_back({std::to_string(idx), m.kind, format_g17(p), std::to_string(d),
                            format_g17(sigma), format_g17(m.constant_used), format_g17(m.lhs),
                            format_g17(m.rhs), format_g17(m.margin), yn(m.holds)});
        if (!m.holds) all_hold = false;
    };

    auto random_radial = [&]() {
        // polynomial vanishing at r = R
        std::vector<double> c(5);
        for (double& x : c) x = rng.uniform(-1.0, 1.0);
        RadialField f;
        f.value = [c, R](double r) {
            double poly = 0.0, rp = 1.0;
            for (double ci : c) {
                poly += ci * rp;
                rp *= r / R;
            }
            return (R - r) * poly;
        };
        f.derivative = [c, R](double r) {
            double poly = 0.0, dpoly = 0.0, rp = 1.0;
            for (std::size_t j = 0; j < c.size(); ++j) {
                poly += c[j] * rp;
                if (j + 1 < c.size()) dpoly += c[j + 1] * (j + 1) * rp / R;
                rp *= r / R;
            }
            return -poly + (R - r) * dpoly;
        };
        return f;
    };

    if (kind == "hardy") {
        if (!(d > p)) {
            finish(rep, rc, "fail: hardy requires d > p", 2);
            return rep;
        }
        InequalityParams prm;
        prm.R = R;
        WeightFunction v = WeightFunction::one(d);
        for (int i = 0; i < samples; ++i)
            push_row(i, inequality_check(InequalityKind::hardy, v, random_radial(), p, d, prm), 0.0);
    } else if (kind == "kebiche" || (kind == "poincare" && d >= 2)) {
        double beta = cfg.get_number_or("beta", 2.0);
        WeightFunction v = WeightFunction::radial_power(beta, d, 1);
        double sigma_min = beta * std::pow(double(d), (2.0 - p) / 2.0);
        double sigma = cfg.get_number_or("sigma", sigma_min);
        double window = 2.0 * sigma * p / (d - p);
        rep.outcomes.push_back({"sigma", format_g17(sigma)});
        rep.outcomes.push_back({"window (7.2)", format_g17(window)});
        if (sigma < sigma_min * (1 - 1e-12)) {
            finish(rep, rc, "fail: condition (7.1) |grad v|_p <= sigma |v|/|x| violated", 2);
            return rep;
        }
        if (!(d > p) || !(window > 0 && window < 1)) {
            finish(rep, rc,
                   "fail: condition (7.2) 0 < 2*sigma*p/(d-p) < 1 violated (value " +
                       format_g17(window) + ")",
                   2);
            return rep;
        }
        InequalityParams prm;
        prm.R = R;
        prm.sigma = sigma;
        if (cfg.has("C_Omega")) prm.C_Omega = cfg.get_number("C_Omega");
        InequalityKind ik =
            kind == "kebiche" ? InequalityKind::kebiche_73 : InequalityKind::poincare_cor;
        for (int i = 0; i < samples; ++i)
            push_row(i, inequality_check(ik, v, random_radial(), p, d, prm), sigma);
    } else if (kind == "oned" || (kind == "poincare" && d == 1)) {
        Domain dom = domain_from_config(cfg);
        WeightFunction v = cfg.has("weight.kind")
                               ? weight_from_config(cfg, "weight.")
                               : WeightFunction::affine_trig(4.0, 1.0, 0.25, 2);
        double sigma = cfg.get_number_or("sigma", 0.0);
        {
            HypothesisParams hp;
            hp.domain = dom;
            hp.p = p;
            hp.d = 1;
            hp.sigma = sigma;
            SamplePlan plan;
            HypothesisReport grad = hypothesis_check(HypothesisKind::gradient_71, v, hp, plan);
            if (sigma > 0 && !grad.holds) {
                finish(rep, rc, "fail: condition (7.1) |v'| <= sigma |v|/|x| violated", 2);
                return rep;
            }
            if (sigma <= 0) sigma = 1.01 * grad.constant;
        }
        double window = 2.0 * sigma * p / (p - 1.0);
        rep.outcomes.push_back({"sigma", format_g17(sigma)});
        rep.outcomes.push_back({"window (7.2)", format_g17(window)});
        if (!(p > 1) || !(window > 0 && window < 1)) {
            finish(rep, rc,
                   "fail: condition (7.2) 0 < 2*sigma*p/(p-1) < 1 violated (value " +
                       format_g17(window) + ")",
                   2);
            return rep;
        }
        int cells = static_cast<int>(cfg.get_int_or("mesh.cells", 192));
        Mesh mesh = build_interval_mesh(dom.a, dom.b, cells, 1.0);
        QuadratureRule rule = QuadratureRule::gauss(5);
        InequalityParams prm;
        prm.sigma = sigma;
        if (cfg.has("C_Omega")) prm.C_Omega = cfg.get_number("C_Omega");
        InequalityKind ik =
            kind == "oned" ? InequalityKind::oned_72 : InequalityKind::poincare_cor;
        MultiIndex e1 = MultiIndex::unit(1, 0);
        for (int i = 0; i < samples; ++i) {
            double lo = dom.a + 0.12 * (dom.b - dom.a), hi = dom.b - 0.12 * (dom.b - dom.a);
            BumpFunction bump;
            bump.center = {rng.uniform(lo, hi), 0.0};
            double maxr = 0.95 * std::min(bump.center[0] - dom.a, dom.b - bump.center[0]);
            bump.radius = {rng.uniform(0.3 * maxr, maxr), 1.0};
            bump.dimension = 1;
            double amp = rng.uniform(-2.0, 2.0);
            ScalarField f;
            f.evaluator = [bump, amp](const Point& x) { return amp * bump.value(x); };
            f.declared_derivatives[e1] = [bump, amp, e1](const Point& x) {
                return amp * bump.derivative(e1, x);
            };
            push_row(i, inequality_check_1d(ik, v, f, p, dom, mesh, rule, prm), sigma);
        }
    } else {
        throw ConfigError("unknown inequality kind `" + kind + "`");
    }

    write_text_atomic(rc.output_dir + "/margins.csv", csv.to_text());
    rep.outcomes.push_back({"samples", std::to_string(samples)});
    rep.outcomes.push_back({"all margins nonnegative", yn(all_hold)});
    if (all_hold)
        finish(rep, rc, "pass", 0);
    else
        finish(rep, rc, "fail: a margin went negative", 2);
    return rep;
}

// ---------------------------------------------------------------------------
// poincare

RunReport poincare_pipeline(const RunConfig& rc) {
    RunReport rep;
    rep.command = rc.command;
    const Config& cfg = rc.config;
    WeightFunction v = cfg.has("weight.kind") ? weight_from_config(cfg, "weight.")
                                              : WeightFunction::one(1);
    Domain dom = domain_from_config(cfg);
    std::vector<int> n_list = cfg.get_int_list_or("cells_list", {16, 32, 64, 128});
    QuadratureRule rule = QuadratureRule::gauss(5);

    CsvTable csv;
    csv.header = {"cells", "dofs", "estimate"};
    std::vector<double> est;
    for (int n : n_list) {
        bool graded = v.zero_set.kind != ZeroSet::Kind::none;
        Mesh mesh = graded ? build_interval_mesh(dom.a, dom.b, n, 3.0, 0.0, true)
                           : build_interval_mesh(dom.a, dom.b, n, 1.0);
        FESpace space = FESpace::build(std::move(mesh));
        double c = estimate_poincare(space, v, rule);
        csv.rows.push_back({std::to_string(n), std::to_string(space.dofs()), format_g17(c)});
        est.push_back(c);
    }
    write_text_atomic(rc.output_dir + "/poincare.csv", csv.to_text());

    bool monotone = true;
    for (std::size_t i = 1; i < est.size(); ++i)
        if (est[i] < est[i - 1] * (1.0 - 1e-6)) monotone = false;
    rep.outcomes.push_back({"estimate (finest)", format_g17(est.back())});
    rep.outcomes.push_back({"monotone nondecreasing", yn(monotone)});
    bool ref_ok = true;
    if (cfg.has("reference")) {
        double ref = cfg.get_number("reference");
        double rt = cfg.get_number_or("rel_tol", 0.01);
        ref_ok = std::abs(est.back() - ref) <= rt * std::abs(ref);
        rep.outcomes.push_back({"reference check", yn(ref_ok)});
    }
    if (monotone && ref_ok)
        finish(rep, rc, "pass", 0);
    else
        finish(rep, rc, "fail: Poincare estimate check", 2);
    return rep;
}

// ---------------------------------------------------------------------------
// solve (manufactured convergence)

RunReport solve_pipeline(const RunConfig& rc) {
    RunReport rep;
    rep.command = rc.command;
    const Config& cfg = rc.config;
    std::vector<int> n_list = cfg.get_int_list_or("cells_list", {16, 32, 64, 128});
    double omin = cfg.get_number_or("order_min", 1.7);
    double omax = cfg.get_number_or("order_max", 2.3);
    QuadratureRule rule = QuadratureRule::gauss(5);

    auto exact = [](double x) { return std::sin(M_PI * x); };
    auto load = [](const Point& p) {
        return (1.0 + M_PI * M_PI) * std::sin(M_PI * p[0]);
    };

    CsvTable csv;
    csv.header = {"level", "cells", "dofs", "l2_error", "order"};
    std::vector<double> errs;
    std::string coo_text;
    for (std::size_t lvl = 0; lvl < n_list.size(); ++lvl) {
        int n = n_list[lvl];
        Mesh mesh = build_interval_mesh(0.0, 1.0, n, 1.0);
        FESpace space = FESpace::build(std::move(mesh));
        CoefficientSet coeffs = CoefficientSet::identity_helmholtz(1, WeightFunction::one(1), load);
        AssembledSystem sys = assemble(coeffs, space, rule);
        SolveReport sol = solve(sys, space, coeffs, default_method(sys), 1e-12, 10000);
        std::vector<double> u(space.mesh.nodes.size(), 0.0);
        for (int dof = 0; dof < space.dofs(); ++dof)
            u[space.node_of_dof[dof]] = sol.coefficients[dof];
        double err2 = integrate(
            [&](const Point& x) {
                // piecewise-linear interpolant error against sin(pi x)
                double xx = x[0];
                int cell = std::min<int>(static_cast<int>(xx * n), n - 1);
                double xa = space.mesh.nodes[cell][0], xb = space.mesh.nodes[cell + 1][0];
                double t = (xx - xa) / (xb - xa);
                double uh = (1.0 - t) * u[cell] + t * u[cell + 1];
                double e = uh - exact(xx);
                return e * e;
            },
            space.mesh, rule);
        double err = std::sqrt(err2);
        double order = errs.empty() ? std::numeric_limits<double>::quiet_NaN()
                                    : std::log2(errs.back() / err);
        csv.rows.push_back({std::to_string(lvl + 1), std::to_string(n),
                            std::to_string(space.dofs()), format_g17(err), format_g17(order)});
        errs.push_back(err);
        if (lvl + 1 == n_list.size()) {
            std::ostringstream coo;
            sys.matrix.write_coo(coo);
            coo_text = coo.str();
        }
    }
    write_text_atomic(rc.output_dir + "/convergence.csv", csv.to_text());
    write_text_atomic(rc.output_dir + "/matrix.coo", coo_text);

    bool orders_ok = true;
    for (std::size_t i = 1; i < errs.size(); ++i) {
        double order = std::log2(errs[i - 1] / errs[i]);
        if (order < omin || order > omax) orders_ok = false;
    }
    rep.outcomes.push_back({"finest l2 error", format_g17(errs.back())});
    rep.outcomes.push_back({"orders in window", yn(orders_ok)});
    if (orders_ok)
        finish(rep, rc, "pass", 0);
    else
        finish(rep, rc, "fail: manufactured-solution order outside window", 2);
    return rep;
}

// ---------------------------------------------------------------------------
// example8 (flagship divergence study)

RunReport example8_pipeline(const RunConfig& rc) {
    RunReport rep;
    rep.command = rc.command;
    const Config& cfg = rc.config;
    int d = static_cast<int>(cfg.get_int_or("d", 2));
    int m = static_cast<int>(cfg.get_int_or("m", 1));
    double beta = cfg.get_number_or("beta", 0.5);
    std::vector<int> rings = cfg.get_int_list_or("rings_list", {8, 16, 32, 64, 128});
    int sectors = static_cast<int>(cfg.get_int_or("sectors", 12));
    double q = cfg.get_number_or("grading", 3.0);
    double K = cfg.get_number_or("K_radius", 0.25);
    double growth = cfg.get_number_or("growth_threshold", 1.3);
    double stability = cfg.get_number_or("stability_threshold", 0.05);
    if (d != 2) throw ConfigError("example8: d = 2 required (FEM meshes are 2D)");

    CoefficientSet coeffs = CoefficientSet::radial_power_instance(d, m, beta);
    Domain dom = Domain::disk(1.0);

    CoercivityReport co = coercivity_check(coeffs, dom);
    rep.outcomes.push_back({"coercivity case", co.case_name()});
    rep.outcomes.push_back({"gamma", format_g17(co.gamma)});
    if (co.which == CoercivityCase::none) {
        finish(rep, rc, "fail: coercivity: no case applies", 2);
        return rep;
    }
    NonintegrabilityReport ni = nonintegrability_check(coeffs, dom);
    rep.outcomes.push_back({"hyp (1) a_ij", yn(ni.a_ok)});
    rep.outcomes.push_back({"hyp (2) b_i", yn(ni.b_ok)});
    rep.outcomes.push_back({"hyp (3) c", yn(ni.c_ok)});
    rep.outcomes.push_back({"hyp (4) k sign", yn(ni.k_sign_ok)});
    rep.outcomes.push_back({"hyp (4) k in L2_{v^-1}", yn(ni.k_l2_ok)});
    rep.outcomes.push_back({"hyp (4) k v^-2 not in L1_loc", yn(ni.k_nonloc_ok)});
    if (!ni.holds) {
        std::string which = !ni.k_sign_ok ? "hypothesis (4): k >= 0 a.e."
                            : !ni.k_l2_ok
                                ? "hypothesis (4): k in L^2_{v^-1}"
                                : !ni.k_nonloc_ok
                                      ? "hypothesis (4): k v^-2 not in L^1_loc (it is integrable)"
                                      : "hypotheses (1)-(3)";
        finish(rep, rc, "fail: nonintegrability " + which, 2);
        return rep;
    }

    std::vector<StudyLevel> levels;
    for (int r : rings) levels.push_back({r, sectors, q});
    StudyTable table = divergence_study(coeffs, levels, K, growth, stability);

    CsvTable csv;
    csv.header = {"level", "rings", "dofs",   "mass", "mass_ratio",
                  "energy", "energy_rel_change", "gamma", "case"};
    for (const StudyRow& r : table.rows)
        csv.rows.push_back({std::to_string(r.level), std::to_string(r.rings),
                            std::to_string(r.dofs), format_g17(r.mass), format_g17(r.mass_ratio),
                            format_g17(r.energy), format_g17(r.energy_rel_change),
                            format_g17(r.gamma), r.case_name});
    write_text_atomic(rc.output_dir + "/study.csv", csv.to_text());

    rep.outcomes.push_back({"levels", std::to_string(table.rows.size())});
    rep.outcomes.push_back({"|h| bound", format_g17(table.h_bound)});
    rep.outcomes.push_back({"mass growth >= threshold", yn(table.mass_growth_ok)});
    rep.outcomes.push_back({"energy stable", yn(table.energy_stable_ok)});
    rep.outcomes.push_back({"a-posteriori bound", yn(table.bound_ok)});
    if (table.aborted) {
        finish(rep, rc, "error: a level's solve did not converge (partial table written)", 1);
        return rep;
    }
    if (!table.has_verdict) {
        finish(rep, rc, "pass (no verdict: needs >= 3 levels)", 0);
        return rep;
    }
    if (table.mass_growth_ok && table.energy_stable_ok && table.bound_ok)
        finish(rep, rc, "pass", 0);
    else
        finish(rep, rc, "fail: divergence-study verdict (local mass must blow up while the energy stays put)", 2);
    return rep;
}

} // namespace

RunReport run(const RunConfig& rc) {
    RunReport rep;
    rep.command = rc.command;
    try {
        if (rc.command == "verify") return verify_pipeline(rc);
        if (rc.command == "density") return density_pipeline(rc);
        if (rc.command == "inequality") return inequality_pipeline(rc);
        if (rc.command == "poincare") return poincare_pipeline(rc);
        if (rc.command == "solve") return solve_pipeline(rc);
        if (rc.command == "example8") return example8_pipeline(rc);
        throw ConfigError("unknown command `" + rc.command + "`");
    } catch (const ConfigError& e) {
        rep.verdict = std::string("error: ") + e.what();
        rep.exit_code = 1;
        return rep;
    } catch (const HypothesisError& e) {
        rep.outcomes.push_back({"hypothesis", e.what()});
        try {
            finish(rep, rc, std::string("fail: ") + e.what(), 2);
        } catch (...) {
            rep.verdict = std::string("fail: ") + e.what();
            rep.exit_code = 2;
        }
        return rep;
    } catch (const std::exception& e) {
        rep.verdict = std::string("error: ") + e.what();
        rep.exit_code = 1;
        return rep;
    }
}

} // namespace degenera
