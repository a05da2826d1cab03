#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "deepnet/errors.hpp"
#include "deepnet/optim.hpp"
#include "deepnet/rbm.hpp"

using namespace deepnet;

namespace {

RbmParams random_rbm(std::size_t nv, std::size_t nh, std::uint64_t seed,
                     double scale = 0.8) {
    Rng rng(seed);
    RbmParams rbm{Matrix(nv, nh), Matrix(1, nv), Matrix(1, nh)};
    for (double& w : rbm.W.data()) w = scale * rng.normal();
    for (double& v : rbm.a.data()) v = scale * rng.normal();
    for (double& v : rbm.b.data()) v = scale * rng.normal();
    return rbm;
}

// summation form of the energy, written independently of the library
double energy_by_sums(const RbmParams& rbm, const std::vector<double>& v,
                      const std::vector<double>& h) {
    double e = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) e -= rbm.a(0, i) * v[i];
    for (std::size_t j = 0; j < h.size(); ++j) e -= rbm.b(0, j) * h[j];
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < h.size(); ++j) e -= v[i] * rbm.W(i, j) * h[j];
    return e;
}

std::vector<double> bits(std::uint32_t n, std::size_t width) {
    std::vector<double> out(width);
    for (std::size_t i = 0; i < width; ++i) out[i] = (n >> i) & 1u ? 1.0 : 0.0;
    return out;
}

const Matrix kPatterns{{1, 0, 1}, {0, 1, 0}, {1, 1, 0}, {0, 0, 1}};

}  // namespace

TEST_CASE("energy fixed values") {
    RbmParams zero{Matrix(2, 1), Matrix(1, 2), Matrix(1, 1)};
    for (std::uint32_t vb = 0; vb < 4; ++vb)
        for (std::uint32_t hb = 0; hb < 2; ++hb)
            CHECK(energy(zero, bits(vb, 2), bits(hb, 1)) == 0.0);

    RbmParams rbm{Matrix{{2.0}, {-1.0}}, Matrix{{0.5, 0.0}}, Matrix{{-1.0}}};
    CHECK(energy(rbm, {1, 0}, {1}) == doctest::Approx(-1.5).epsilon(1e-15));

    CHECK_THROWS_AS(static_cast<void>(energy(rbm, {1, 0, 1}, {1})), ShapeError);
}

TEST_CASE("energy matrix form equals summation form") {
    RbmParams rbm = random_rbm(4, 3, 77);
    Rng rng(78);
    for (int t = 0; t < 100; ++t) {
        auto v = bits(std::uint32_t(rng.uniform_int(16)), 4);
        auto h = bits(std::uint32_t(rng.uniform_int(8)), 3);
        CHECK(std::abs(energy(rbm, v, h) - energy_by_sums(rbm, v, h)) < 1e-12);
    }
}

TEST_CASE("conditional probabilities") {
    RbmParams zero{Matrix(3, 2), Matrix(1, 3), Matrix(1, 2)};
    Matrix v{{1, 0, 1}};
    Matrix hp = hidden_probs(zero, v);
    for (std::size_t j = 0; j < 2; ++j) CHECK(hp(0, j) == 0.5);
    Matrix vp = visible_probs(zero, Matrix{{1, 0}});
    for (std::size_t i = 0; i < 3; ++i) CHECK(vp(0, i) == 0.5);

    // b = 0, W column (2, -1), v = (1, 1) -> sigma(1)
    RbmParams rbm{Matrix{{2.0}, {-1.0}}, Matrix(1, 2), Matrix(1, 1)};
    CHECK(hidden_probs(rbm, Matrix{{1, 1}})(0, 0) ==
          doctest::Approx(0.7310585786300049).epsilon(1e-12));

    // a = 1, W row (-2), h = 1 -> sigma(-1)
    RbmParams rbm2{Matrix{{-2.0}}, Matrix{{1.0}}, Matrix(1, 1)};
    CHECK(visible_probs(rbm2, Matrix{{1.0}})(0, 0) ==
          doctest::Approx(0.2689414213699951).epsilon(1e-12));
}

TEST_CASE("visible/hidden symmetry under transposing the model") {
    RbmParams rbm = random_rbm(4, 3, 5);
    RbmParams flipped{transpose(rbm.W), rbm.b, rbm.a};
    Matrix h{{1, 0, 1}};
    CHECK(visible_probs(rbm, h) == hidden_probs(flipped, h));
}

TEST_CASE("conditional factorization against enumeration") {
    // p(h | v) enumerated from the joint equals the product of the
    // per-unit conditionals on a 3x2 model
    RbmParams rbm = random_rbm(3, 2, 13);
    Rng rng(14);
    for (std::uint32_t vb = 0; vb < 8; ++vb) {
        auto v = bits(vb, 3);
        // joint over h by enumeration
        std::vector<double> joint(4);
        double z_v = 0.0;
        for (std::uint32_t hb = 0; hb < 4; ++hb) {
            joint[hb] = std::exp(-energy(rbm, v, bits(hb, 2)));
            z_v += joint[hb];
        }
        Matrix probs = hidden_probs(rbm, Matrix(1, 3, v));
        for (std::uint32_t hb = 0; hb < 4; ++hb) {
            auto h = bits(hb, 2);
            double product = 1.0;
            for (std::size_t j = 0; j < 2; ++j)
                product *= h[j] == 1.0 ? probs(0, j) : 1.0 - probs(0, j);
            CHECK(joint[hb] / z_v == doctest::Approx(product).epsilon(1e-10));
        }
    }
}

TEST_CASE("sample_bernoulli") {
    Rng rng(21);
    Matrix zeros(5, 5), ones(5, 5);
    for (double& v : ones.data()) v = 1.0;
    CHECK(sample_bernoulli(zeros, rng) == Matrix(5, 5));
    CHECK(sample_bernoulli(ones, rng) == ones);

    Matrix p(100, 1000);
    for (double& v : p.data()) v = 0.3;
    Matrix s = sample_bernoulli(p, rng);
    double mean = 0.0;
    for (double v : s.data()) mean += v;
    mean /= double(s.size());
    CHECK(mean > 0.29);
    CHECK(mean < 0.31);

    Matrix bad{{1.5}};
    CHECK_THROWS_AS(static_cast<void>(sample_bernoulli(bad, rng)), ParamError);
}

TEST_CASE("exact enumeration oracles") {
    SUBCASE("zero-parameter partition function is the configuration count") {
        RbmParams zero{Matrix(2, 1), Matrix(1, 2), Matrix(1, 1)};
        CHECK(exact_partition(zero) == doctest::Approx(8.0).epsilon(1e-12));
        for (std::uint32_t vb = 0; vb < 4; ++vb)
            CHECK(exact_marginal(zero, bits(vb, 2)) ==
                  doctest::Approx(0.25).epsilon(1e-12));
    }
    SUBCASE("marginals sum to one") {
        for (std::uint64_t seed : {1, 2, 3}) {
            RbmParams rbm = random_rbm(4, 3, seed);
            double total = 0.0;
            for (std::uint32_t vb = 0; vb < 16; ++vb)
                total += exact_marginal(rbm, bits(vb, 4));
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    SUBCASE("guard rejects oversized models") {
        RbmParams big{Matrix(20, 5), Matrix(1, 20), Matrix(1, 5)};
        CHECK_THROWS_AS(static_cast<void>(exact_partition(big)), CapacityError);
    }
}

TEST_CASE("exact log-likelihood gradient matches finite differences") {
    RbmParams rbm = random_rbm(3, 2, 31, 0.5);
    RbmGradients grads = exact_loglik_gradient(rbm, kPatterns);

    auto objective = [&](const std::vector<Matrix>& params) {
        RbmParams probe{params[0], params[1], params[2]};
        return exact_loglik(probe, kPatterns);
    };
    auto fd = finite_diff_gradient(objective, {rbm.W, rbm.a, rbm.b}, 1e-5);
    auto close = [&](const Matrix& got, const Matrix& want) {
        for (std::size_t i = 0; i < got.size(); ++i)
            CHECK(std::abs(got.data()[i] - want.data()[i]) < 1e-6);
    };
    close(grads.dW, fd[0]);
    close(grads.da, fd[1]);
    close(grads.db, fd[2]);
}

TEST_CASE("init_rbm") {
    Rng rng(41);
    Matrix data{{1, 0, 1}, {1, 0, 0}, {1, 0, 1}, {1, 0, 0}};
    RbmParams rbm = init_rbm(3, 2, data, rng);
    // unit 2 active in half the examples -> bias 0
    CHECK(rbm.a(0, 2) == doctest::Approx(0.0).epsilon(1e-12));
    // never-active unit clamps at log(0.001/0.999)
    CHECK(rbm.a(0, 1) == doctest::Approx(-6.906754778648554).epsilon(1e-12));
    // always-active unit clamps symmetrically
    CHECK(rbm.a(0, 0) == doctest::Approx(6.906754778648554).epsilon(1e-12));
    CHECK(rbm.b == Matrix(1, 2));

    double sq = 0.0;
    for (double w : rbm.W.data()) sq += w * w;
    CHECK(std::sqrt(sq / double(rbm.W.size())) < 0.05);

    CHECK_THROWS_AS(static_cast<void>(init_rbm(3, 2, Matrix(0, 3), rng)), ParamError);
}

TEST_CASE("cd_update with zero learning rate changes nothing") {
    RbmParams rbm = random_rbm(3, 2, 51);
    RbmParams before = rbm;
    RbmVelocity vel;
    CdConfig cfg;
    cfg.learning_rate = 0.0;
    Rng rng(52);
    double err = cd_update(rbm, kPatterns, cfg, vel, rng);
    CHECK(rbm.W == before.W);
    CHECK(rbm.a == before.a);
    CHECK(rbm.b == before.b);
    CHECK(err > 0.0);
}

TEST_CASE("always-on unit drives its visible bias upward") {
    Matrix data{{1, 0, 0}, {1, 1, 0}, {1, 0, 1}, {1, 1, 1}};
    int rising = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        RbmParams rbm{Matrix(3, 2), Matrix(1, 3), Matrix(1, 2)};
        for (double& w : rbm.W.data()) w = 0.01 * rng.normal();
        const double a0 = rbm.a(0, 0);
        CdConfig cfg;
        cfg.learning_rate = 0.1;
        cfg.epochs = 30;
        cfg.batch_size = 4;
        train_rbm(rbm, data, cfg, rng);
        if (rbm.a(0, 0) > a0) ++rising;
    }
    CHECK(rising >= 19);
}

TEST_CASE("CD-1 improves the exact log-likelihood on a tiny model") {
    int improved = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        RbmParams rbm = init_rbm(3, 2, kPatterns, rng);
        const double before = exact_loglik(rbm, kPatterns);
        CdConfig cfg;
        cfg.learning_rate = 0.05;
        cfg.epochs = 500;
        cfg.batch_size = 4;
        train_rbm(rbm, kPatterns, cfg, rng);
        if (exact_loglik(rbm, kPatterns) > before) ++improved;
    }
    CHECK(improved >= 19);
}

TEST_CASE("binary reconstruction flag stays on the 0/1 grid") {
    RbmParams rbm = random_rbm(3, 2, 61);
    RbmVelocity vel;
    CdConfig cfg;
    cfg.binary_reconstruction = true;
    cfg.learning_rate = 0.1;
    Rng rng(62);
    // reconstruction error of binary reconstructions is a mean of 0/1
    // mismatches; over a 4x3 batch it is a multiple of 1/12
    double err = cd_update(rbm, kPatterns, cfg, vel, rng);
    CHECK(std::abs(err * 12.0 - std::round(err * 12.0)) < 1e-12);
}
