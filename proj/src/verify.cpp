#include "co4/verify.hpp"

#include <cmath>
#include <sstream>

#include "co4/attention.hpp"
#include "co4/overload_sim.hpp"
#include "co4/precision.hpp"

namespace co4 {

namespace {

Vec random_vec(Rng& rng, std::size_t d, double lo = -1.0, double hi = 1.0) {
    std::vector<double> v(d);
    for (double& x : v) x = lo + (hi - lo) * rng.uniform();
    return Vec(std::move(v));
}

Mat random_mat(Rng& rng, std::size_t r, std::size_t c, double lo = -1.0,
               double hi = 1.0) {
    std::vector<double> v(r * c);
    for (double& x : v) x = lo + (hi - lo) * rng.uniform();
    return Mat(r, c, std::move(v));
}

RegimeParams random_regime(Rng& rng) {
    switch (rng.below(4)) {
        case 0:
            return RegimeParams(MentalState::SWSleep, rng.uniform(), 0.0);
        case 1:
            return RegimeParams(MentalState::Wakefulness,
                                0.7 + 0.3 * rng.uniform(),
                                0.3 + 0.399 * rng.uniform());
        case 2:
            return RegimeParams(MentalState::REMSleep, 0.3 * rng.uniform(),
                                0.7 + 0.3 * rng.uniform());
        default:
            return RegimeParams(MentalState::AwakeThought,
                                0.7 + 0.3 * rng.uniform(),
                                0.7 + 0.3 * rng.uniform());
    }
}

TransferConfig random_transfer(Rng& rng, std::size_t d) {
    return TransferConfig(random_vec(rng, d), random_vec(rng, d),
                          0.1 + 1.9 * rng.uniform());
}

PrecisionMatrix random_precision(Rng& rng, std::size_t n, std::size_t m,
                                 double pi_min) {
    std::vector<double> v(n * m);
    for (double& x : v) x = pi_min + (1.0 - pi_min) * rng.uniform();
    return PrecisionMatrix(Mat(n, m, std::move(v)), pi_min);
}

// Independent scalar recomputation of MOD(R, C); deliberately avoids the
// tpn entry points so it can catch them drifting.
double scalar_mod(const Vec& r, const Vec& c, const TransferConfig& cfg,
                  const RegimeParams& regime) {
    const double d = static_cast<double>(r.size());
    double wr = 0.0, wc = 0.0, rc = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) {
        wr += cfg.w_r[k] * r[k];
        wc += cfg.w_c[k] * c[k];
        rc += r[k] * c[k];
    }
    return regime.r_gain * wr / d + regime.c_gain * wc / d +
           cfg.interaction_scale * regime.r_gain * regime.c_gain * rc / d;
}

struct Recorder {
    VerifyResult& out;
    std::uint64_t seed;

    void check(bool ok, const std::string& what) {
        ++out.checks;
        if (!ok) {
            ++out.failures;
            std::ostringstream msg;
            msg << what << " (seed " << seed << ")";
            out.messages.push_back(msg.str());
        }
    }
};

void run_gradcheck(VerifyResult& out, const VerifyOptions& opts) {
    for (int trial = 0; trial < 10; ++trial) {
        const std::uint64_t seed = Rng::mix(opts.seed, trial);
        Rng rng(seed);
        Recorder rec{out, seed};
        const std::size_t n = 1 + rng.below(8);
        const std::size_t m = 1 + rng.below(8);
        const std::size_t d = 1 + rng.below(8);
        const std::size_t dv = 1 + rng.below(8);

        const AttentionInputs in(random_mat(rng, n, d), random_mat(rng, m, d),
                                 random_mat(rng, m, dv));
        const double pi_min = 0.02 + 0.2 * rng.uniform();
        const PrecisionMatrix pi = random_precision(rng, n, m, pi_min);
        const Mat upstream = random_mat(rng, n, dv);

        const AttentionGradients grads = gated_attention_grad(in, pi, upstream);

        auto loss_with = [&](const Mat& q, const Mat& k, const Mat& v) {
            const Mat y = gated_attention(AttentionInputs(q, k, v), pi);
            double acc = 0.0;
            for (std::size_t i = 0; i < y.rows(); ++i) {
                for (std::size_t c = 0; c < y.cols(); ++c) {
                    acc += upstream(i, c) * y(i, c);
                }
            }
            return acc;
        };

        auto check_grad = [&](const Mat& analytic, std::size_t rows,
                              std::size_t cols,
                              const std::function<double(const Vec&)>& f,
                              const std::vector<double>& flat,
                              const char* label) {
            const Vec fd = fd_gradient(f, Vec(flat), 1e-5);
            double num = 0.0, na = 0.0, nf = 0.0;
            for (std::size_t i = 0; i < rows * cols; ++i) {
                const double a = analytic.values()[i];
                const double diff = a - fd[i];
                num += diff * diff;
                na += a * a;
                nf += fd[i] * fd[i];
            }
            const double rel = std::sqrt(num) /
                               std::max({std::sqrt(na), std::sqrt(nf), 1e-12});
            std::ostringstream what;
            what << "gradcheck " << label << " rel err " << rel;
            rec.check(rel < 1e-4, what.str());
        };

        check_grad(
            grads.d_q, n, d,
            [&](const Vec& x) {
                return loss_with(Mat(n, d, x.values()), in.k, in.v);
            },
            in.q.values(), "dQ");
        check_grad(
            grads.d_k, m, d,
            [&](const Vec& x) {
                return loss_with(in.q, Mat(m, d, x.values()), in.v);
            },
            in.k.values(), "dK");
        check_grad(
            grads.d_v, m, dv,
            [&](const Vec& x) {
                return loss_with(in.q, in.k, Mat(m, dv, x.values()));
            },
            in.v.values(), "dV");
    }
}

void run_oracle(VerifyResult& out, const VerifyOptions& opts) {
    constexpr double kTol = 1e-12;
    for (int trial = 0; trial < 100; ++trial) {
        const std::uint64_t seed = Rng::mix(opts.seed, 1000 + trial);
        Rng rng(seed);
        Recorder rec{out, seed};
        const std::size_t n = 1 + rng.below(8);
        const std::size_t m = 1 + rng.below(8);
        const std::size_t d = 1 + rng.below(8);

        // ratio (Eq. 2 shape): gamma really is the plain quotient
        {
            const double sc = 0.1 + 10.0 * rng.uniform();
            const double sr = 0.1 + 10.0 * rng.uniform();
            const OverloadRatio r = overload_ratio(sc, sr);
            rec.check(std::fabs(r.gamma - sc / sr) <= kTol,
                      "oracle ratio mismatch");
            rec.check(r.synchrony == (sc / sr >= 1.0),
                      "oracle ratio classification mismatch");
        }

        const TransferConfig cfg = random_transfer(rng, d);
        const RegimeParams regime = random_regime(rng);

        std::vector<Vec> evidence, contexts;
        for (std::size_t i = 0; i < n; ++i) {
            evidence.push_back(random_vec(rng, d));
        }
        // context assembly: library vs loop, then feed the assembled
        // vectors onward
        const double lambda = 2.0 * rng.uniform();
        for (std::size_t j = 0; j < m; ++j) {
            const Vec internal = random_vec(rng, d);
            const Vec feedback = random_vec(rng, d);
            const Vec assembled =
                assemble_context(ContextAssembly(internal, feedback, lambda));
            double err = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                err = std::max(err, std::fabs(assembled[k] -
                                              (internal[k] +
                                               lambda * feedback[k])));
            }
            rec.check(err <= kTol, "oracle context assembly mismatch");
            contexts.push_back(assembled);
        }

        // modulation transfer and its clamped precision, pair by pair
        const double pi_min = 0.01 + 0.5 * rng.uniform();
        const PrecisionMatrix pm =
            active_precision(evidence, contexts, cfg, regime, pi_min);
        double mod_err = 0.0, clamp_err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                const double expect = scalar_mod(evidence[i], contexts[j],
                                                 cfg, regime);
                mod_err = std::max(
                    mod_err,
                    std::fabs(mod_transfer(evidence[i], contexts[j], cfg,
                                           regime) -
                              expect));
                const double clamped =
                    std::min(1.0, std::max(pi_min, expect));
                clamp_err = std::max(clamp_err,
                                     std::fabs(pm(i, j) - clamped));
            }
        }
        rec.check(mod_err <= kTol, "oracle modulation transfer mismatch");
        rec.check(clamp_err <= kTol, "oracle precision clamp mismatch");

        // precision-weighted update: library vs double loop
        {
            const Mat errors = random_mat(rng, n, m, -2.0, 2.0);
            const double lr = 0.1 + rng.uniform();
            const BeliefState before(random_vec(rng, n), lr);
            const BeliefState after =
                update_belief_active(before, errors, pm);
            double err = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j < m; ++j) {
                    acc += pm(i, j) * errors(i, j);
                }
                err = std::max(err, std::fabs(after.mu[i] -
                                              (before.mu[i] + lr * acc)));
            }
            rec.check(err <= kTol, "oracle belief update mismatch");
        }
    }
}

void run_invariants(VerifyResult& out, const VerifyOptions& opts) {
    // clamp bounds on raw values (independent of the PrecisionMatrix
    // class validator)
    for (int trial = 0; trial < 200; ++trial) {
        const std::uint64_t seed = Rng::mix(opts.seed, 2000 + trial);
        Rng rng(seed);
        Recorder rec{out, seed};
        const std::size_t n = 1 + rng.below(8);
        const std::size_t m = 1 + rng.below(8);
        const std::size_t d = 1 + rng.below(8);
        const double pi_min = 0.01 + 0.5 * rng.uniform();

        std::vector<Vec> evidence, contexts;
        for (std::size_t i = 0; i < n; ++i) {
            evidence.push_back(random_vec(rng, d, -3.0, 3.0));
        }
        for (std::size_t j = 0; j < m; ++j) {
            contexts.push_back(random_vec(rng, d, -3.0, 3.0));
        }
        const PrecisionMatrix pm =
            active_precision(evidence, contexts, random_transfer(rng, d),
                             random_regime(rng), pi_min);

        std::vector<double> values = pm.values().values();
        if (opts.inject_fault && trial == 0) values[0] = 1.5;
        bool in_bounds = true;
        for (double v : values) {
            if (v < pi_min || v > 1.0) in_bounds = false;
        }
        rec.check(in_bounds, "invariant violated: precision outside "
                             "[pi_min, 1]");

        // gated attention rows stay stochastic
        const std::size_t dv = 1 + rng.below(4);
        const AttentionInputs in(random_mat(rng, n, d), random_mat(rng, m, d),
                                 random_mat(rng, m, dv));
        const Mat weights = gated_attention_weights(in, pm);
        double row_err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < m; ++j) sum += weights(i, j);
            row_err = std::max(row_err, std::fabs(sum - 1.0));
        }
        rec.check(row_err <= 1e-12,
                  "invariant violated: attention row sum != 1");

        // effective rate never increases with the threshold
        double prev = 1e300;
        bool monotone = true;
        for (double thr = pi_min; thr <= 1.0; thr += (1.0 - pi_min) / 7.0) {
            const double rate = effective_rate(pm, thr, 100.0);
            if (rate > prev + 1e-12) monotone = false;
            if (rate > 100.0 + 1e-12) monotone = false;
            prev = rate;
        }
        rec.check(monotone,
                  "invariant violated: effective_rate not monotone");
    }

    // budget and identical-exposure invariants on a short episode
    {
        const std::uint64_t seed = Rng::mix(opts.seed, 3000);
        Recorder rec{out, seed};
        TrackEnv env = make_track({64, 3.0, 1.2, 40.0});
        StreamConfig stream{16, 0.25, 0.1, 2.0};
        AgentConfig agent;
        agent.s_c = 4;

        Rng a(seed), b(seed);
        bool identical = true;
        for (int t = 0; t < env.horizon && identical; ++t) {
            const auto sa = generate_signals(t, env, stream, a);
            const auto sb = generate_signals(t, env, stream, b);
            for (std::size_t i = 0; i < sa.size(); ++i) {
                if (sa[i].payload != sb[i].payload ||
                    sa[i].channel != sb[i].channel ||
                    sa[i].is_relevant != sb[i].is_relevant) {
                    identical = false;
                }
            }
        }
        rec.check(identical,
                  "invariant violated: paired streams not identical");

        for (AgentVariant variant :
             {AgentVariant::Baseline, AgentVariant::Co4}) {
            agent.variant = variant;
            const EpisodeResult ep = run_episode(env, agent, stream, seed);
            bool budget_ok = true, rate_ok = true;
            for (int count : ep.attended_counts) {
                if (count > agent.s_c) budget_ok = false;
            }
            for (double eff : ep.effective_per_step) {
                if (eff > stream.s_r + 1e-12) rate_ok = false;
            }
            rec.check(budget_ok, "invariant violated: attention budget");
            rec.check(rate_ok, "invariant violated: effective rate > s_r");
            rec.check(ep.metrics.gamma ==
                          overload_ratio(agent.s_c, stream.s_r).gamma,
                      "invariant violated: reported gamma");
        }
    }
}

} // namespace

VerifyResult verify_suite(std::string_view name, const VerifyOptions& opts) {
    VerifyResult out;
    out.suite = std::string(name);
    if (name == "gradcheck") {
        run_gradcheck(out, opts);
    } else if (name == "oracle") {
        run_oracle(out, opts);
    } else if (name == "invariants") {
        run_invariants(out, opts);
    } else {
        throw DomainError("unknown verification suite: " + out.suite);
    }
    return out;
}

} // namespace co4
