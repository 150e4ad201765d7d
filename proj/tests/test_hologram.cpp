#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "qam/bench.hpp"
#include "qam/encode.hpp"
#include "qam/hologram.hpp"
#include "qam/rng.hpp"
#include "test_util.hpp"

using namespace qam;
using Catch::Matchers::WithinAbs;

namespace {

// Brute-force reference: J_hj = sum_k psi_h psi_j*, straight double loop.
ComplexVec oracle_matrix(const std::vector<StatePattern>& patterns) {
    const std::size_t n = patterns[0].size();
    ComplexVec m(n * n);
    for (std::size_t h = 0; h < n; ++h)
        for (std::size_t j = 0; j < n; ++j) {
            Complex sum{};
            for (const StatePattern& p : patterns)
                sum += p.amplitudes[h] * std::conj(p.amplitudes[j]);
            m[h * n + j] = sum;
        }
    return m;
}

ComplexVec oracle_matvec(const ComplexVec& m, std::span<const Complex> x) {
    const std::size_t n = x.size();
    ComplexVec y(n);
    for (std::size_t h = 0; h < n; ++h) {
        Complex sum{};
        for (std::size_t j = 0; j < n; ++j) sum += m[h * n + j] * x[j];
        y[h] = sum;
    }
    return y;
}

Complex oracle_dot(std::span<const Complex> a, std::span<const Complex> b) {
    Complex sum{};
    for (std::size_t j = 0; j < a.size(); ++j) sum += std::conj(a[j]) * b[j];
    return sum;
}

} // namespace

TEST_CASE("build of a single bipolar pattern matches the hand outer product") {
    const StatePattern psi = bipolar_encode({{1.0, -1.0}, std::nullopt}, 0.0);
    const Hologram h = Hologram::build(std::span(&psi, 1));
    REQUIRE_THAT(h.entry(0, 0).real(), WithinAbs(0.5, 1e-12));
    REQUIRE_THAT(h.entry(0, 1).real(), WithinAbs(-0.5, 1e-12));
    REQUIRE_THAT(h.entry(1, 0).real(), WithinAbs(-0.5, 1e-12));
    REQUIRE_THAT(h.entry(1, 1).real(), WithinAbs(0.5, 1e-12));
    for (const Complex& z : h.matrix()) REQUIRE(z.imag() == 0.0);
}

TEST_CASE("a {0, pi} phase pattern builds the identical matrix") {
    const StatePattern bip = bipolar_encode({{1.0, -1.0}, std::nullopt}, 0.0);
    const std::vector<double> phases{0.0, std::numbers::pi};
    const StatePattern ph = phase_state(phases);
    const Hologram hb = Hologram::build(std::span(&bip, 1));
    const Hologram hp = Hologram::build(std::span(&ph, 1));
    for (std::size_t i = 0; i < 4; ++i) {
        REQUIRE(hb.matrix()[i].real() == hp.matrix()[i].real());
        REQUIRE(hb.matrix()[i].imag() == hp.matrix()[i].imag());
    }
}

TEST_CASE("build matches the elementwise oracle on random phase patterns") {
    const auto patterns = gen_random_phase_patterns(321, 4, 2);
    const Hologram h = Hologram::build(patterns);
    const ComplexVec ref = oracle_matrix(patterns);
    for (std::size_t i = 0; i < ref.size(); ++i)
        REQUIRE_THAT(std::abs(h.matrix()[i] - ref[i]), WithinAbs(0.0, 1e-12));
}

TEST_CASE("build rejects contract violations") {
    REQUIRE_THROWS_AS(Hologram::build({}), DomainError);

    auto patterns = gen_random_phase_patterns(5, 4, 2);
    patterns[1].amplitudes.pop_back();
    REQUIRE_THROWS_AS(Hologram::build(patterns), DomainError);

    auto bad = gen_random_phase_patterns(6, 4, 1);
    for (auto& z : bad[0].amplitudes) z *= 1.5;
    REQUIRE_THROWS_AS(Hologram::build(bad), DomainError);

    auto poisoned = gen_random_phase_patterns(8, 4, 1);
    poisoned[0].amplitudes[2] = Complex{std::nan(""), 0.0};
    REQUIRE_THROWS_AS(Hologram::build(poisoned), DomainError);

    auto ok = gen_random_phase_patterns(7, 4, 2);
    REQUIRE_THROWS_AS(Hologram::build(ok, {"only-one"}), DomainError);
}

TEST_CASE("holograms are Hermitian with trace P") {
    Xoshiro256StarStar rng(99);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng.next_unit() * 30);
        const std::size_t p = 1 + static_cast<std::size_t>(rng.next_unit() * 8);
        const Hologram h =
            Hologram::build(gen_random_phase_patterns(rng.next(), n, p));
        REQUIRE(h.hermiticity_residual() <= 1e-12);
        REQUIRE_THAT(h.trace_real(), WithinAbs(static_cast<double>(p), 1e-9));
    }
}

TEST_CASE("recall_dense returns a stored pattern exactly") {
    const auto patterns = gen_random_phase_patterns(17, 6, 1);
    const Hologram h = Hologram::build(patterns);
    const ComplexVec out = h.recall_dense(patterns[0].amplitudes);
    for (std::size_t j = 0; j < out.size(); ++j)
        REQUIRE_THAT(std::abs(out[j] - patterns[0].amplitudes[j]), WithinAbs(0.0, 1e-12));
}

TEST_CASE("recall_dense with orthogonal stored patterns has no cross-term") {
    const std::vector<StatePattern> patterns{
        bipolar_encode({{1, 1, 1, 1}, std::nullopt}, 0.0),
        bipolar_encode({{1, -1, 1, -1}, std::nullopt}, 0.0)};
    const Hologram h = Hologram::build(patterns);
    const ComplexVec out = h.recall_dense(patterns[0].amplitudes);
    for (std::size_t j = 0; j < 4; ++j)
        REQUIRE_THAT(std::abs(out[j] - patterns[0].amplitudes[j]), WithinAbs(0.0, 1e-12));
}

TEST_CASE("recall_dense matches the reference matrix-vector product") {
    const auto patterns = gen_random_phase_patterns(23, 8, 3);
    const Hologram h = Hologram::build(patterns);
    const auto probe = gen_random_phase_patterns(24, 8, 1);
    const ComplexVec got = h.recall_dense(probe[0].amplitudes);
    const ComplexVec want = oracle_matvec(oracle_matrix(patterns), probe[0].amplitudes);
    for (std::size_t j = 0; j < 8; ++j)
        REQUIRE_THAT(std::abs(got[j] - want[j]), WithinAbs(0.0, 1e-12));
}

TEST_CASE("recall_dense rejects dimension mismatch") {
    const Hologram h = Hologram::build(gen_random_phase_patterns(1, 4, 1));
    const ComplexVec probe(3, Complex{0.5, 0.0});
    REQUIRE_THROWS_AS(h.recall_dense(probe), DomainError);
}

TEST_CASE("recall_lazy agrees with recall_dense") {
    struct Case { std::size_t n, p; std::uint64_t seed; };
    for (const Case c : {Case{6, 1, 31}, Case{8, 3, 32}, Case{512, 8, 33}}) {
        const auto patterns = gen_random_phase_patterns(c.seed, c.n, c.p);
        const Hologram h = Hologram::build(patterns);
        const auto probe = gen_random_phase_patterns(c.seed + 100, c.n, 1);
        const ComplexVec dense = h.recall_dense(probe[0].amplitudes);
        const ComplexVec lazy = h.recall_lazy(probe[0].amplitudes);
        for (std::size_t j = 0; j < c.n; ++j) {
            const double diff = std::abs(dense[j] - lazy[j]);
            const double scale = std::max(std::abs(dense[j]), std::abs(lazy[j]));
            REQUIRE((diff <= 1e-12 || diff / scale <= 1e-10));
        }
    }
}

TEST_CASE("recall_lazy with P = 1 is the coefficient times the pattern") {
    const auto patterns = gen_random_phase_patterns(41, 5, 1);
    const Hologram h = Hologram::build(patterns);
    const auto probe = gen_random_phase_patterns(42, 5, 1);
    const Complex c = oracle_dot(patterns[0].amplitudes, probe[0].amplitudes);
    const ComplexVec out = h.recall_lazy(probe[0].amplitudes);
    for (std::size_t j = 0; j < 5; ++j)
        REQUIRE_THAT(std::abs(out[j] - c * patterns[0].amplitudes[j]),
                     WithinAbs(0.0, 1e-12));
}

TEST_CASE("recall is linear") {
    const auto patterns = gen_random_phase_patterns(51, 12, 4);
    const Hologram h = Hologram::build(patterns);
    const auto probes = gen_random_phase_patterns(52, 12, 2);
    const Complex alpha{0.3, -0.8}, beta{-1.1, 0.25};
    ComplexVec mix(12);
    for (std::size_t j = 0; j < 12; ++j)
        mix[j] = alpha * probes[0].amplitudes[j] + beta * probes[1].amplitudes[j];
    const ComplexVec lhs = h.recall_dense(mix);
    const ComplexVec x = h.recall_dense(probes[0].amplitudes);
    const ComplexVec y = h.recall_dense(probes[1].amplitudes);
    for (std::size_t j = 0; j < 12; ++j)
        REQUIRE_THAT(std::abs(lhs[j] - (alpha * x[j] + beta * y[j])),
                     WithinAbs(0.0, 1e-10));
}

TEST_CASE("overlap with a stored pattern has unit modulus") {
    const auto patterns = gen_random_phase_patterns(61, 16, 4);
    const Hologram h = Hologram::build(patterns);
    for (std::size_t k = 0; k < 4; ++k) {
        const OverlapReport r = h.overlaps(patterns[k].amplitudes);
        REQUIRE(r.winner == k);
        REQUIRE_THAT(r.confidence, WithinAbs(1.0, 1e-12));
    }
}

TEST_CASE("orthogonal phase vectors give overlaps (1, 0)") {
    const std::vector<double> flat{0, 0, 0, 0};
    const std::vector<double> alt{0, std::numbers::pi, 0, std::numbers::pi};
    const std::vector<StatePattern> patterns{phase_state(flat), phase_state(alt)};
    const Hologram h = Hologram::build(patterns);
    const OverlapReport r = h.overlaps(patterns[0].amplitudes);
    REQUIRE(r.winner == 0);
    REQUIRE_THAT(std::abs(r.coefficients[0]), WithinAbs(1.0, 1e-12));
    REQUIRE_THAT(std::abs(r.coefficients[1]), WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(r.margin, WithinAbs(1.0, 1e-12));
}

TEST_CASE("overlaps matches the dot-product oracle under perturbation") {
    const auto patterns = gen_random_phase_patterns(71, 16, 4);
    const Hologram h = Hologram::build(patterns);
    const StatePattern probe = perturb_phases(patterns[2], 0.3, 72);
    const OverlapReport r = h.overlaps(probe.amplitudes);
    for (std::size_t k = 0; k < 4; ++k) {
        const Complex want = oracle_dot(patterns[k].amplitudes, probe.amplitudes);
        REQUIRE_THAT(std::abs(r.coefficients[k] - want), WithinAbs(0.0, 1e-12));
    }
    REQUIRE(r.winner == 2);
}

TEST_CASE("overlaps rejects non-normalized input") {
    const Hologram h = Hologram::build(gen_random_phase_patterns(81, 4, 1));
    ComplexVec probe(4, Complex{1.0, 0.0});
    REQUIRE_THROWS_AS(h.overlaps(probe), DomainError);
}

TEST_CASE("overlap moduli satisfy Cauchy-Schwarz") {
    Xoshiro256StarStar rng(91);
    for (int rep = 0; rep < 25; ++rep) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng.next_unit() * 20);
        const std::size_t p = 1 + static_cast<std::size_t>(rng.next_unit() * 6);
        const auto patterns = gen_random_phase_patterns(rng.next(), n, p);
        const Hologram h = Hologram::build(patterns);
        const auto probe = gen_random_phase_patterns(rng.next(), n, 1);
        const OverlapReport r = h.overlaps(probe[0].amplitudes);
        for (const Complex& c : r.coefficients) REQUIRE(std::abs(c) <= 1.0 + 1e-9);
        REQUIRE(r.margin >= 0.0);
        REQUIRE(r.confidence <= 1.0 + 1e-9);
    }
}

TEST_CASE("recognize accepts a stored pattern and rejects an orthogonal probe") {
    const std::vector<StatePattern> patterns{
        bipolar_encode({{1, 1, 1, 1}, std::nullopt}, 0.0),
        bipolar_encode({{1, -1, 1, -1}, std::nullopt}, 0.0)};
    const Hologram h = Hologram::build(patterns);

    const Recognition hit = h.recognize(patterns[0].amplitudes, 0.9);
    REQUIRE(hit.recognized);
    REQUIRE(hit.report.winner == 0);

    // orthogonal to both stored patterns
    const StatePattern probe = bipolar_encode({{1, 1, -1, -1}, std::nullopt}, 0.0);
    const Recognition miss = h.recognize(probe.amplitudes, 0.1);
    REQUIRE_FALSE(miss.recognized);
    for (const Complex& c : miss.report.coefficients)
        REQUIRE_THAT(std::abs(c), WithinAbs(0.0, 1e-12));
}

TEST_CASE("an equal superposition of two stored patterns is ambiguous") {
    const std::vector<StatePattern> patterns{
        bipolar_encode({{1, 1, 1, 1}, std::nullopt}, 0.0),
        bipolar_encode({{1, -1, 1, -1}, std::nullopt}, 0.0)};
    const Hologram h = Hologram::build(patterns);

    ComplexVec mix(4);
    for (std::size_t j = 0; j < 4; ++j)
        mix[j] = patterns[0].amplitudes[j] + patterns[1].amplitudes[j];
    const double norm = euclidean_norm(std::span<const Complex>(mix));
    for (Complex& z : mix) z /= norm;

    const Recognition r = h.recognize(mix, 0.9);
    REQUIRE_FALSE(r.recognized);
    const double inv_root2 = 1.0 / std::sqrt(2.0);
    REQUIRE_THAT(std::abs(r.report.coefficients[0]), WithinAbs(inv_root2, 1e-12));
    REQUIRE_THAT(std::abs(r.report.coefficients[1]), WithinAbs(inv_root2, 1e-12));
    for (std::size_t k = 0; k < 2; ++k) {
        const Complex want = oracle_dot(patterns[k].amplitudes, mix);
        REQUIRE_THAT(std::abs(r.report.coefficients[k] - want), WithinAbs(0.0, 1e-12));
    }
}

TEST_CASE("recognize validates min_confidence") {
    const Hologram h = Hologram::build(gen_random_phase_patterns(1, 4, 1));
    const auto probe = gen_random_phase_patterns(2, 4, 1);
    REQUIRE_THROWS_AS(h.recognize(probe[0].amplitudes, 1.5), DomainError);
    REQUIRE_THROWS_AS(h.recognize(probe[0].amplitudes, -0.1), DomainError);
}

TEST_CASE("global input phase does not change recognition") {
    const auto patterns = gen_random_phase_patterns(111, 10, 3);
    const Hologram h = Hologram::build(patterns);
    ComplexVec rotated = patterns[1].amplitudes;
    const Complex phase = unit_phasor(1.234);
    for (Complex& z : rotated) z *= phase;
    const OverlapReport a = h.overlaps(patterns[1].amplitudes);
    const OverlapReport b = h.overlaps(rotated);
    REQUIRE(a.winner == b.winner);
    REQUIRE_THAT(a.confidence, WithinAbs(b.confidence, 1e-12));
}

TEST_CASE("orthonormalized stored patterns are recall eigenstates") {
    const auto patterns = gen_random_phase_patterns(121, 32, 6);
    std::vector<ComplexVec> vecs;
    for (const auto& p : patterns) vecs.push_back(p.amplitudes);
    vecs = test_util::orthonormalize(std::move(vecs));
    std::vector<StatePattern> basis;
    for (auto& v : vecs) basis.push_back({v, EncodingKind::Phase});
    const Hologram h = Hologram::build(basis);
    for (const auto& p : basis) {
        const ComplexVec out = h.recall_dense(p.amplitudes);
        for (std::size_t j = 0; j < out.size(); ++j)
            REQUIRE_THAT(std::abs(out[j] - p.amplitudes[j]), WithinAbs(0.0, 1e-10));
    }
}

TEST_CASE("single-pattern matrix is the sign XNOR table") {
    Xoshiro256StarStar rng(131);
    // any dimension: entries equal xnor(s_h, s_j) times the common modulus,
    // bit for bit
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng.next_unit() * 50);
        RawPattern raw;
        std::vector<int> sign(n);
        for (std::size_t j = 0; j < n; ++j) {
            sign[j] = rng.next_unit() < 0.5 ? -1 : 1;
            raw.values.push_back(sign[j]);
        }
        const StatePattern psi = bipolar_encode(raw, 0.0);
        const Hologram h = Hologram::build(std::span(&psi, 1));
        const double magnitude = h.entry(0, 0).real();
        REQUIRE(magnitude > 0.0);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) {
                const double want = sign[a] == sign[b] ? magnitude : -magnitude;
                REQUIRE(h.entry(a, b).real() == want);
                REQUIRE(h.entry(a, b).imag() == 0.0);
            }
    }
    // power-of-four dimension: N * J_hj is exactly +-1
    for (const std::size_t n : {4u, 16u, 64u}) {
        RawPattern raw;
        std::vector<int> sign(n);
        for (std::size_t j = 0; j < n; ++j) {
            sign[j] = rng.next_unit() < 0.5 ? -1 : 1;
            raw.values.push_back(sign[j]);
        }
        const StatePattern psi = bipolar_encode(raw, 0.0);
        const Hologram h = Hologram::build(std::span(&psi, 1));
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) {
                const double xnor = sign[a] == sign[b] ? 1.0 : -1.0;
                REQUIRE(static_cast<double>(n) * h.entry(a, b).real() == xnor);
            }
    }
}
