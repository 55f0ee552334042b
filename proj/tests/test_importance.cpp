#include <doctest.h>

#include <random>

#include "langgeo/importance.hpp"
#include "oracles.hpp"

using namespace langgeo;

namespace {

double max_rel_error(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want)
{
    return ((got - want).array().abs() / want.array().abs().max(1e-300)).maxCoeff();
}

Hessian raw(const Eigen::MatrixXd& h) { return {h, 0.0}; }

} // namespace

TEST_SUITE("importance")
{
    TEST_CASE("hessian of identity activations without damping is the identity")
    {
        const Eigen::MatrixXd x = Eigen::MatrixXd::Identity(2, 2);
        const Hessian h = accumulate_hessian(std::vector<Eigen::MatrixXd>{x}, DampingPolicy::absolute(0.0));
        CHECK(h.data.isApprox(Eigen::MatrixXd::Identity(2, 2)));
        CHECK(h.damping == 0.0);
    }

    TEST_CASE("zero activations leave only the damping term")
    {
        const Eigen::MatrixXd x = Eigen::MatrixXd::Zero(4, 3);
        const Hessian h = accumulate_hessian(std::vector<Eigen::MatrixXd>{x}, DampingPolicy::absolute(0.5));
        CHECK(h.data == 0.5 * Eigen::MatrixXd::Identity(3, 3));
    }

    TEST_CASE("zero activations without damping are singular")
    {
        const Eigen::MatrixXd x = Eigen::MatrixXd::Zero(4, 3);
        CHECK_THROWS_AS(accumulate_hessian(std::vector<Eigen::MatrixXd>{x}, DampingPolicy::absolute(0.0)),
                        NumericError);
    }

    TEST_CASE("batched accumulation equals the concatenated gram matrix")
    {
        std::mt19937_64 rng(7);
        const Eigen::MatrixXd x = oracle::random_matrix(8, 3, rng);
        const Hessian batched = accumulate_hessian(
            std::vector<Eigen::MatrixXd>{x.topRows(5), x.bottomRows(3)}, DampingPolicy::relative(0.01));

        Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(3, 3);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                for (int r = 0; r < 8; ++r) {
                    gram(i, j) += x(r, i) * x(r, j);
                }
            }
        }
        const double lambda = 0.01 * gram.trace() / 3.0;
        gram.diagonal().array() += lambda;
        CHECK(batched.damping == doctest::Approx(lambda).epsilon(1e-14));
        CHECK((batched.data - gram).cwiseAbs().maxCoeff() <= 1e-12);
    }

    TEST_CASE("float batches are accumulated in double")
    {
        Eigen::MatrixXf x(2, 2);
        x << 1.0f, 2.0f, 3.0f, 4.0f;
        HessianAccumulator acc;
        acc.add(x);
        const Hessian h = acc.finalize(DampingPolicy::absolute(0.0));
        Eigen::MatrixXd want(2, 2);
        want << 10, 14, 14, 20;
        CHECK(h.data == want);
    }

    TEST_CASE("accumulator rejects mismatched and non-finite batches")
    {
        HessianAccumulator acc;
        acc.add(Eigen::MatrixXd::Ones(2, 3));
        CHECK_THROWS_AS(acc.add(Eigen::MatrixXd::Ones(2, 4)), ValidationError);
        Eigen::MatrixXd bad = Eigen::MatrixXd::Ones(1, 3);
        bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(acc.add(bad), ValidationError);
        CHECK_THROWS_AS(HessianAccumulator{}.finalize(DampingPolicy::relative()), ValidationError);
    }

    TEST_CASE("identity hessian gives squared weights")
    {
        std::mt19937_64 rng(1);
        const Eigen::MatrixXd w = oracle::random_matrix(3, 4, rng);
        const auto s = score_layer({w, 7}, raw(Eigen::MatrixXd::Identity(4, 4)));
        CHECK(s.layer_id == 7);
        CHECK(max_rel_error(s.data, w.array().square().matrix()) <= 1e-15);
    }

    TEST_CASE("scaled identity hessian scales the scores")
    {
        std::mt19937_64 rng(2);
        const Eigen::MatrixXd w = oracle::random_matrix(2, 5, rng);
        const double lambda = 0.3;
        const auto s = score_layer({w, 0}, raw((1.0 + lambda) * Eigen::MatrixXd::Identity(5, 5)));
        CHECK(max_rel_error(s.data, (w.array().square() * (1.0 + lambda)).matrix()) <= 1e-14);
    }

    TEST_CASE("scores match an explicitly inverted hessian")
    {
        std::mt19937_64 rng(3);
        const Eigen::MatrixXd w = oracle::random_matrix(3, 3, rng);
        const Eigen::MatrixXd h = oracle::random_spd(3, rng);
        const Eigen::MatrixXd inv = oracle::inverse(h);
        Eigen::MatrixXd want(3, 3);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                want(i, j) = w(i, j) * w(i, j) / inv(j, j);
            }
        }
        CHECK(max_rel_error(score_layer({w, 0}, raw(h)).data, want) <= 1e-10);
    }

    TEST_CASE("score shapes must agree")
    {
        CHECK_THROWS_AS(score_layer({Eigen::MatrixXd::Ones(2, 3), 0}, raw(Eigen::MatrixXd::Identity(4, 4))),
                        ValidationError);
    }

    TEST_CASE("singular hessian is reported as a numeric failure")
    {
        Eigen::MatrixXd h = Eigen::MatrixXd::Ones(3, 3);
        CHECK_THROWS_AS(HessianFactor{h}, NumericError);
        try {
            HessianFactor f(h);
        } catch (const NumericError& e) {
            CHECK(std::string(e.what()) == "singular Hessian, increase damping");
        }
    }

    TEST_CASE("identity hessian error increase is half the squared weight")
    {
        const Eigen::Vector2d w(3.0, 4.0);
        const Hessian h = raw(Eigen::MatrixXd::Identity(2, 2));
        CHECK(obd_error_increase(w, h, 0) == doctest::Approx(4.5));
        const auto u = optimal_update(w, h, 1);
        CHECK(u.delta(0) == 0.0);
        CHECK(u.delta(1) == -4.0);
        CHECK(u.error_increase == doctest::Approx(8.0));
    }

    TEST_CASE("zero weight costs nothing")
    {
        std::mt19937_64 rng(4);
        const Hessian h = raw(oracle::random_spd(4, rng));
        Eigen::Vector4d w(1.0, 0.0, -2.0, 0.5);
        CHECK(obd_error_increase(w, h, 1) == 0.0);
        CHECK(optimal_update(w, h, 1).delta.isZero());
    }

    TEST_CASE("diagonal hessian moves only the pruned coordinate")
    {
        const Eigen::Vector3d w(0.7, -1.3, 2.1);
        const Hessian h = raw(Eigen::Vector3d(2.0, 5.0, 0.25).asDiagonal());
        for (Eigen::Index q = 0; q < 3; ++q) {
            const auto u = optimal_update(w, h, q);
            CHECK(u.delta(q) == -w(q));
            for (Eigen::Index i = 0; i < 3; ++i) {
                if (i != q) {
                    CHECK(u.delta(i) == 0.0);
                }
            }
        }
    }

    TEST_CASE("error increase equals the constrained minimum for every index")
    {
        std::mt19937_64 rng(5);
        const Eigen::VectorXd w = oracle::random_matrix(4, 1, rng);
        const Eigen::MatrixXd h = oracle::random_spd(4, rng);
        for (Eigen::Index q = 0; q < 4; ++q) {
            const auto want = oracle::constrained_minimum(w, h, q);
            const double got = obd_error_increase(w, raw(h), q);
            CHECK(std::abs(got - want.value) <= 1e-9 * std::abs(want.value));
            const auto u = optimal_update(w, raw(h), q);
            CHECK(std::abs(oracle::quadratic(u.delta, h) - want.value) <= 1e-9 * std::abs(want.value));
        }
    }

    TEST_CASE("optimal update beats random feasible perturbations")
    {
        std::mt19937_64 rng(6);
        const Eigen::VectorXd w = oracle::random_matrix(5, 1, rng);
        const Eigen::MatrixXd h = oracle::random_spd(5, rng);
        const Eigen::Index q = 2;
        const auto u = optimal_update(w, raw(h), q);
        const double best = oracle::quadratic(u.delta, h);
        std::normal_distribution<double> g;
        int violations = 0;
        for (int trial = 0; trial < 10000; ++trial) {
            Eigen::VectorXd d(5);
            for (Eigen::Index i = 0; i < 5; ++i) {
                d(i) = g(rng);
            }
            d(q) = -w(q);
            violations += oracle::quadratic(d, h) < best * (1.0 - 1e-9) ? 1 : 0;
        }
        CHECK(violations == 0);
    }

    TEST_CASE("pruned index must be in range")
    {
        const Eigen::Vector2d w(1.0, 2.0);
        CHECK_THROWS_AS(obd_error_increase(w, raw(Eigen::MatrixXd::Identity(2, 2)), 2), ValidationError);
        CHECK_THROWS_AS(optimal_update(w, raw(Eigen::MatrixXd::Identity(3, 3)), 0), ValidationError);
    }
}
