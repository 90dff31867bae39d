// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria. Pass criterion numbers as arguments to run a
// subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "schelling/experiments.hpp"
#include "schelling/math.hpp"
#include "schelling/rng.hpp"

using namespace schelling;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> body;
};

ModelParams make(int n, int w, const char* ta, const char* tb) {
    ModelParams p;
    p.n = n;
    p.w = w;
    p.tau_alpha = Rational::parse(ta);
    p.tau_beta = Rational::parse(tb);
    return p;
}

std::vector<std::uint64_t> seeds(std::uint64_t master, int count) {
    std::vector<std::uint64_t> s;
    for (int i = 0; i < count; ++i)
        s.push_back(derive_seed(master, static_cast<std::uint64_t>(i)));
    return s;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

Outcome threshold(bool three, double expected, double tol) {
    const auto r = three ? math::kappa_3d() : math::kappa_2d();
    Outcome o;
    o.pass = std::abs(r.value - expected) <= tol && r.residual <= 1e-12;
    o.detail = "value " + fmt("%.10f", r.value) + ", residual " + fmt("%.2e", r.residual);
    return o;
}

Outcome table_gaps() {
    struct Row {
        double tau, d2, d3;
    };
    const Row rows[] = {
        {0.39, 0.0244432, 0.0900756}, {0.40, 0.022266, 0.0822134},  {0.41, 0.0200757, 0.0742546},
        {0.42, 0.0178737, 0.0662106}, {0.43, 0.0156614, 0.0580921}, {0.45, 0.0112116, 0.0416727},
        {0.47, 0.0067368, 0.0250741}, {0.49, 0.0022472, 0.0083697},
    };
    double worst = 0;
    for (const Row& r : rows) {
        worst = std::max(worst, std::abs(math::min_gap(r.tau, math::Relation::TwoD) - r.d2));
        worst = std::max(worst, std::abs(math::min_gap(r.tau, math::Relation::ThreeD) - r.d3));
    }
    return {worst <= 1e-5, "16 entries, max deviation " + fmt("%.2e", worst)};
}

Outcome figure_cells() {
    const auto s = seeds(2024, 5);
    std::ostringstream d;
    bool ok = true;

    const TrialStats a = run_trials(make(600, 2, "0.249", "0.1"), s, 0.05);
    ok &= a.majority() == BehaviorLabel::StaticAE && a.votes(BehaviorLabel::StaticAE) >= 3;
    double min_unchanged = 1;
    for (const auto& t : a.trials)
        min_unchanged = std::min(min_unchanged, t.unchanged_fraction);
    ok &= a.mean_unchanged_fraction >= 0.95;
    d << "(0.249,0.1) static " << a.votes(BehaviorLabel::StaticAE) << "/5 unchanged "
      << fmt("%.4f", a.mean_unchanged_fraction) << " (min " << fmt("%.4f", min_unchanged) << "); ";

    const TrialStats b = run_trials(make(600, 2, "0.4", "0.3"), s, 0.25);
    ok &= b.majority() == BehaviorLabel::BetaTakeoverAE && b.votes(BehaviorLabel::BetaTakeoverAE) >= 3;
    ok &= 1.0 - b.mean_alpha_fraction_final >= 0.75;
    d << "(0.4,0.3) beta AE " << b.votes(BehaviorLabel::BetaTakeoverAE) << "/5 beta "
      << fmt("%.4f", 1.0 - b.mean_alpha_fraction_final) << "; ";

    const TrialStats c = run_trials(make(600, 2, "0.6", "0.4"), s, 0.25);
    ok &= c.all_beta_count == 5;
    d << "(0.6,0.4) all beta " << c.all_beta_count << "/5";
    return {ok, d.str()};
}

Outcome sharpening() {
    const auto s = seeds(44, 3);
    const TrialStats w5 = run_trials(make(600, 5, "0.44", "0.42"), s, 0.1);
    const TrialStats w10 = run_trials(make(600, 10, "0.44", "0.42"), s, 0.1);
    const double b5 = 1.0 - w5.mean_alpha_fraction_final;
    const double b10 = 1.0 - w10.mean_alpha_fraction_final;
    return {b10 > b5, "mean beta fraction w=5 " + fmt("%.4f", b5) + ", w=10 " + fmt("%.4f", b10)};
}

Outcome oracle() {
    int agree = 0;
    std::set<int> widths;
    std::string first_bad;
    for (int i = 0; i < 100; ++i) {
        const OracleInstance inst = oracle_instance(20, 606, static_cast<std::uint64_t>(i));
        widths.insert(inst.params.w);
        const OracleReport r = compare_with_reference(random_config(inst.params, inst.seed));
        if (r.agree)
            ++agree;
        else if (first_bad.empty())
            first_bad = ", first mismatch at instance " + std::to_string(i);
    }
    return {agree == 100 && widths.size() == 3,
            std::to_string(agree) + "/100 identical at every stage, " + std::to_string(oracle_tau_pairs().size()) +
                " intolerance pairs" + first_bad};
}

Outcome monte_carlo() {
    std::ostringstream d;
    bool ok = std::abs(math::prob_event_exact(EventKind::uh, 1, Rational(1, 4)) - 46.0 / 512.0) <= 1e-15;
    d << "uh(1,1/4) exact " << fmt("%.8f", math::prob_event_exact(EventKind::uh, 1, Rational(1, 4)));
    double worst = 0;
    std::uint64_t k = 0;
    for (EventKind kind : {EventKind::uh, EventKind::ruh, EventKind::ln})
        for (int w : {1, 2, 3}) {
            EventSpec spec;
            spec.kind = kind;
            spec.tau = kind == EventKind::uh ? Rational(1, 4) : Rational(2, 5);
            const double exact = math::prob_event_exact(kind, w, spec.tau);
            const std::uint64_t trials = 1000000;
            const EventEstimate e = estimate_event_prob(spec, w, 2, trials, derive_seed(7, k++));
            const double sigma = std::sqrt(exact * (1 - exact) / static_cast<double>(trials));
            const double z = std::abs(e.estimate - exact) / sigma;
            worst = std::max(worst, z);
            ok &= z <= 3.0;
        }
    d << "; 9 estimates of 1e6 trials, worst |z| " << fmt("%.2f", worst);
    return {ok, d.str()};
}

Outcome sign_properties() {
    const double kappa = math::kappa_2d().value;
    int violations = 0, points = 0;
    for (int i = 0; i < 1000; ++i) {
        const double t = 0.5 * (i + 0.5) / 1000.0;
        ++points;
        violations += (math::u4_base(t) > 1.0) != (t > kappa);
    }
    int points5 = 0;
    for (int i = 0; i < 32; ++i)
        for (int j = 0; j < 32; ++j) {
            const double t = 0.5 * (i + 0.5) / 32.0;
            const double tb = 0.5 * (j + 0.5) / 32.0;
            ++points5;
            violations += (math::u5_base(t, tb) > 1.0) != math::suff_less_2d(tb, t);
        }
    return {violations == 0, std::to_string(points) + " + " + std::to_string(points5) + " grid points, " +
                                 std::to_string(violations) + " violations"};
}

Outcome firewall() {
    const double gamma = 0.55;
    const ModelParams p = make(200, 3, "0.6", "0.4");
    const auto r_star = find_min_r(p.w, p.tau_beta, gamma);
    if (!r_star)
        return {false, "no r satisfies the disc conditions"};
    const Region disc = Region::disc(p, {100, 100, 0}, Rational(*r_star * p.w, 1));
    if (!is_beta_stable(Configuration(p, NodeType::Beta), disc))
        return {false, "planted disc is not beta stable"};
    int all_beta = 0, monotone = 0;
    std::uint64_t max_stages = 0;
    for (std::uint64_t s : seeds(9, 5)) {
        const PlantResult r = plant_and_run(p, disc, NodeType::Beta, s);
        all_beta += r.run.final.count(NodeType::Beta) == r.run.final.size();
        bool mono = true;
        for (std::size_t i = 1; i < r.radius_trace.size(); ++i)
            mono &= r.radius_trace[i] >= r.radius_trace[i - 1];
        monotone += mono;
        max_stages = std::max<std::uint64_t>(max_stages, r.run.reports.size());
    }
    return {all_beta == 5 && monotone == 5,
            "r* " + std::to_string(*r_star) + " (gamma 0.55, disc radius " + std::to_string(*r_star * p.w) +
                "), all beta " + std::to_string(all_beta) + "/5, non-decreasing trace " + std::to_string(monotone) +
                "/5, at most " + std::to_string(max_stages) + " stages"};
}

Outcome stability() {
    const char* ta_values[] = {"0.3", "0.35", "0.4"};
    const char* tb_values[] = {"0.3", "0.45", "0.55", "0.7"};
    int stable = 0, preserved = 0, nontrivial = 0;
    for (int i = 0; i < 20; ++i) {
        const int w = 1 + i % 3;
        ModelParams p = make(60 + 10 * (i % 4), w, ta_values[i % 3], tb_values[(i / 3) % 4]);
        const Region disc = Region::disc(p, {p.n / 2, p.n / 3, 0}, Rational(4 * w, 1));
        if (!is_alpha_stable(Configuration(p, NodeType::Alpha), disc))
            continue;
        ++stable;
        const PlantResult r = plant_and_run(p, disc, NodeType::Alpha, derive_seed(10, static_cast<std::uint64_t>(i)));
        preserved += r.plant_preserved;
        nontrivial += r.run.reports.size() > 1;
    }
    return {stable == 20 && preserved == 20,
            std::to_string(stable) + "/20 planted discs verified alpha stable, " + std::to_string(preserved) +
                "/20 kept every alpha node (" + std::to_string(nontrivial) + " runs with flips)"};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "kappa root", 1.0, [] { return threshold(false, 0.365227, 1e-5); }},
        {2, "kappa_star root", 1.0, [] { return threshold(true, 0.3897216, 1e-6); }},
        {3, "minimal-gap table", 5.0, table_gaps},
        {4, "behaviour cells at n=600, w=2", 3 * 300.0, figure_cells},
        {5, "takeover sharpens from w=5 to w=10", 900.0, sharpening},
        {6, "fast vs naive engine", 60.0, oracle},
        {7, "exact vs Monte Carlo event probabilities", 60.0, monte_carlo},
        {8, "threshold sign properties", 1.0, sign_properties},
        {9, "planted firewall spreads", 60.0, firewall},
        {10, "alpha-stable region survives", 60.0, stability},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i)
        wanted.insert(std::stoi(argv[i]));

    int failed = 0;
    for (const Criterion& c : criteria) {
        if (!wanted.empty() && !wanted.count(c.id))
            continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.body();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs <= c.budget_seconds;
        const bool pass = o.pass && in_time;
        failed += !pass;
        std::printf("%s %2d %s: %s [%.2f s of %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                    secs, c.budget_seconds, in_time ? "" : ", over budget");
        std::fflush(stdout);
    }
    return failed;
}
