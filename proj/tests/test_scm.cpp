#include <doctest.h>

#include "vmkl/errors.hpp"
#include "vmkl/quadrature.hpp"
#include "vmkl/scm.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <vector>

using namespace vmkl;

namespace {

using Pdf1 = std::function<double(double)>;

// Total variation between a 50-bin histogram of 1-D draws on [0,1] and the bin masses of `pdf`.
double histogram_tv(const PointSet& draws, const Pdf1& pdf, std::size_t bins = 50)
{
  std::vector<double> counts(bins, 0.0);
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const auto b = std::min<std::size_t>(bins - 1, static_cast<std::size_t>(draws[i][0] * bins));
    counts[b] += 1.0;
  }
  double tv = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    const auto rule = quad::gauss_legendre(24, double(b) / bins, double(b + 1) / bins);
    double mass = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      mass += rule.weights[i] * pdf(rule.nodes[i]);
    tv += std::abs(counts[b] / draws.size() - mass);
  }
  return 0.5 * tv;
}

std::shared_ptr<const ScmInstance> model(Structure s, std::size_t dim = 1)
{
  return std::make_shared<const ScmInstance>(make_scm(s, dim, 12.0, 1));
}

} // namespace

TEST_CASE("zero coupling is rejected for lack of dependence")
{
  for (Structure s : {Structure::AtoB, Structure::BtoA, Structure::Confounded}) {
    try {
      make_scm(s, 1, 0.0, 1);
      FAIL("expected SeparationError");
    } catch (const SeparationError& e) {
      CHECK(e.epsilon_star() < 1e-9);
    }
  }
}

TEST_CASE("reference instances certify a usable separation")
{
  for (Structure s : {Structure::AtoB, Structure::BtoA, Structure::Confounded}) {
    for (std::size_t dim : {1u, 2u, 3u}) {
      const ScmInstance scm = make_scm(s, dim, 12.0, 1);
      CHECK(scm.epsilon_star() >= 0.1);
      CHECK(scm.epsilon_star() <= scm.mutual_information());
      CHECK(scm.certification_error() < 1e-6);
    }
  }
  CHECK_THROWS_AS(make_scm(Structure::AtoB, 4, 12.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_scm(Structure::AtoB, 0, 12.0, 1), std::invalid_argument);
}

TEST_CASE("density floor audit passes for every structure and dimension")
{
  for (Structure s : {Structure::AtoB, Structure::BtoA, Structure::Confounded}) {
    for (std::size_t dim : {1u, 2u}) {
      const ScmInstance scm = make_scm(s, dim, 12.0, 3);
      const DensityAudit audit = audit_density_floor(scm, dim == 1 ? 201 : 41);
      CHECK(audit.passed);
      CHECK(audit.recorded_bound > 0.0);
      CHECK(audit.min_marginal_a >= audit.recorded_bound);
      CHECK(audit.min_marginal_b >= audit.recorded_bound);
      CHECK(audit.min_conditional >= audit.recorded_bound);
      CHECK(audit.min_interventional >= audit.recorded_bound);
    }
  }
}

TEST_CASE("marginals, conditionals and interventional laws integrate to one")
{
  for (Structure s : {Structure::AtoB, Structure::BtoA, Structure::Confounded}) {
    const auto scm = model(s);
    auto integral = [](const Pdf1& f) { return quad::adaptive(f, 0.0, 1.0, 1e-10).value; };
    for (Variable v : {Variable::A, Variable::B})
      CHECK(integral([&](double x) { return scm->marginal_pdf(v, std::span<const double>(&x, 1)); }) ==
            doctest::Approx(1.0).epsilon(1e-8));
    for (double g : {0.1, 0.5, 0.93}) {
      CHECK(integral([&](double y) {
              return scm->conditional_pdf(Variable::B, std::span<const double>(&g, 1), std::span<const double>(&y, 1));
            }) == doctest::Approx(1.0).epsilon(1e-8));
      CHECK(integral([&](double y) {
              return scm->interventional_pdf(Variable::A, std::span<const double>(&g, 1), std::span<const double>(&y, 1));
            }) == doctest::Approx(1.0).epsilon(1e-8));
    }
  }
}

TEST_CASE("interventions respect the causal structure")
{
  // Pairs (target, does the other variable's law move) per structure.
  struct Expect
  {
    Structure s;
    bool a_moves_b;
    bool b_moves_a;
  };
  for (const Expect e : {Expect{Structure::AtoB, true, false}, Expect{Structure::BtoA, false, true},
                         Expect{Structure::Confounded, false, false}}) {
    const auto scm = model(e.s);
    double worst_a = 0.0;
    double worst_b = 0.0;
    for (int i = 0; i <= 20; ++i) {
      const double v = i / 20.0;
      for (int j = 0; j <= 200; ++j) {
        const double y = j / 200.0;
        const std::span<const double> vs(&v, 1);
        const std::span<const double> ys(&y, 1);
        worst_a = std::max(worst_a, std::abs(scm->interventional_pdf(Variable::A, vs, ys) - scm->marginal_pdf(Variable::B, ys)));
        worst_b = std::max(worst_b, std::abs(scm->interventional_pdf(Variable::B, vs, ys) - scm->marginal_pdf(Variable::A, ys)));
        if (e.a_moves_b)
          REQUIRE(scm->interventional_pdf(Variable::A, vs, ys) ==
                  doctest::Approx(scm->conditional_pdf(Variable::B, vs, ys)).epsilon(1e-12));
        if (e.b_moves_a)
          REQUIRE(scm->interventional_pdf(Variable::B, vs, ys) ==
                  doctest::Approx(scm->conditional_pdf(Variable::A, vs, ys)).epsilon(1e-12));
      }
    }
    CAPTURE(to_string(e.s));
    CHECK((worst_a > 0.1) == e.a_moves_b);
    CHECK((worst_b > 0.1) == e.b_moves_a);
    if (!e.a_moves_b)
      CHECK(worst_a <= 1e-9);
    if (!e.b_moves_a)
      CHECK(worst_b <= 1e-9);
  }
}

TEST_CASE("observational A has the quadrature mean")
{
  const auto scm = model(Structure::AtoB);
  SamplingOracle oracle(scm, 17, 0);
  const PointSet a = oracle.sample_obs_marginal(Variable::A, 100000);
  double s = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += a[i][0];
    s2 += a[i][0] * a[i][0];
  }
  const double mean = s / a.size();
  const double se = std::sqrt((s2 / a.size() - mean * mean) / a.size());
  const double exact = quad::adaptive([&](double x) { return x * scm->marginal_pdf(Variable::A, std::span<const double>(&x, 1)); },
                                      0.0, 1.0, 1e-12)
                         .value;
  CHECK(std::abs(mean - exact) <= 3.0 * se);
}

TEST_CASE("counters add up")
{
  SamplingOracle oracle(model(Structure::AtoB), 1, 0);
  oracle.sample_obs_marginal(Variable::B, 100);
  oracle.sample_obs_marginal(Variable::B, 100);
  CHECK(oracle.counters().obs_b == 200);
  oracle.sample_obs_joint(30);
  const double v[1] = {0.3};
  oracle.sample_interventional(Variable::A, v, 40);
  oracle.sample_obs_marginal(Variable::A, 5);
  const SampleCounters& c = oracle.counters();
  CHECK(c.joint == 30);
  CHECK(c.interventional == 40);
  CHECK(c.obs_a == 5);
  CHECK(c.observational() == 235);
  CHECK(c.total() == 275);
}

TEST_CASE("histograms match the quadrature laws")
{
  const double a0 = 0.37;
  const std::span<const double> av(&a0, 1);
  {
    const auto scm = model(Structure::AtoB);
    SamplingOracle oracle(scm, 5, 0);
    const PointSet b = oracle.sample_obs_marginal(Variable::B, 100000);
    CHECK(histogram_tv(b, [&](double y) { return scm->marginal_pdf(Variable::B, std::span<const double>(&y, 1)); }) <= 0.03);
    const PointSet ba = oracle.sample_interventional(Variable::A, av, 100000);
    CHECK(histogram_tv(ba, [&](double y) { return scm->conditional_pdf(Variable::B, av, std::span<const double>(&y, 1)); }) <=
          0.03);
    const PointSet ab = oracle.sample_interventional(Variable::B, av, 100000);
    CHECK(histogram_tv(ab, [&](double y) { return scm->marginal_pdf(Variable::A, std::span<const double>(&y, 1)); }) <= 0.03);
    const PointSet joint = oracle.sample_obs_joint(100000);
    PointSet joint_b(1);
    for (std::size_t i = 0; i < joint.size(); ++i)
      joint_b.push_back(joint[i].subspan(1, 1));
    CHECK(histogram_tv(joint_b, [&](double y) { return scm->marginal_pdf(Variable::B, std::span<const double>(&y, 1)); }) <=
          0.03);
  }
  {
    const auto scm = model(Structure::Confounded);
    SamplingOracle oracle(scm, 6, 0);
    for (double a : {0.05, 0.5, 0.95}) {
      const PointSet b = oracle.sample_interventional(Variable::A, std::span<const double>(&a, 1), 100000);
      CHECK(histogram_tv(b, [&](double y) { return scm->marginal_pdf(Variable::B, std::span<const double>(&y, 1)); }) <=
            0.03);
    }
  }
}

TEST_CASE("samples lie in the unit box and streams are reproducible")
{
  for (Structure s : {Structure::AtoB, Structure::BtoA, Structure::Confounded}) {
    const auto scm = model(s, 2);
    SamplingOracle o1(scm, 9, 4);
    SamplingOracle o2(scm, 9, 4);
    SamplingOracle o3(scm, 9, 5);
    const PointSet j1 = o1.sample_obs_joint(2000);
    const PointSet j2 = o2.sample_obs_joint(2000);
    const PointSet j3 = o3.sample_obs_joint(2000);
    CHECK(j1.coords() == j2.coords());
    CHECK(j1.coords() != j3.coords());
    CHECK(DomainBox::cube(4, 0.0, 1.0).contains_all(j1));
    const double v[2] = {0.2, 0.9};
    const PointSet iv = o1.sample_interventional(Variable::B, v, 2000);
    CHECK(scm->domain().contains_all(iv));
    CHECK(iv.coords() == o2.sample_interventional(Variable::B, v, 2000).coords());
    const double outside[2] = {0.2, 1.1};
    CHECK_THROWS_AS(o1.sample_interventional(Variable::A, outside, 1), std::out_of_range);
  }
}

TEST_CASE("model description round-trips through its config text")
{
  const ScmInstance scm = make_scm(Structure::Confounded, 2, 12.0, 42);
  const ScmInstance back = scm_from_config(scm.to_config());
  CHECK(back.structure() == scm.structure());
  CHECK(back.dim() == 2);
  CHECK(back.epsilon_star() == doctest::Approx(scm.epsilon_star()).epsilon(1e-12));
  const double a[2] = {0.3, 0.6};
  const double b[2] = {0.8, 0.1};
  CHECK(back.joint_pdf(a, b) == doctest::Approx(scm.joint_pdf(a, b)).epsilon(1e-12));
  CHECK(scm.to_config() == back.to_config());
  CHECK_THROWS_AS(scm_from_config("structure=AtoB\n"), std::invalid_argument);
}

TEST_CASE("seed jitters the extra coordinates only")
{
  const ScmInstance s1 = make_scm(Structure::AtoB, 3, 12.0, 1);
  const ScmInstance s2 = make_scm(Structure::AtoB, 3, 12.0, 2);
  CHECK(s1.mechanisms()[0].strength == s2.mechanisms()[0].strength);
  CHECK(s1.mechanisms()[1].strength != s2.mechanisms()[1].strength);
  CHECK(s1.mechanisms()[0].strength == 12.0);
}

TEST_CASE("d_max bounds the scaled interventional divergence")
{
  for (Structure s : {Structure::AtoB, Structure::BtoA, Structure::Confounded}) {
    const auto scm = model(s);
    for (Edge e : {Edge::AtoB, Edge::BtoA}) {
      const Variable cause = e == Edge::AtoB ? Variable::A : Variable::B;
      const Variable effect = e == Edge::AtoB ? Variable::B : Variable::A;
      const double dmax = scm->d_max(e, TestMode::withObs);
      CHECK(dmax > 0.0);
      CHECK(scm->d_max(e, TestMode::withObs, DmaxRule::logRatio) > 0.0);
      for (int i = 0; i <= 40; ++i) {
        const double a = i / 40.0;
        const double kl = quad::adaptive(
                            [&](double y) {
                              const std::span<const double> ys(&y, 1);
                              const double p = scm->interventional_pdf(cause, std::span<const double>(&a, 1), ys);
                              return p * std::log(p / scm->marginal_pdf(effect, ys));
                            },
                            0.0, 1.0, 1e-9)
                            .value;
        REQUIRE(kl / dmax <= 1.0 + 1e-3);
        REQUIRE(kl / dmax >= -1e-9);
      }
    }
  }
}

TEST_CASE("enumeration names parse back")
{
  for (Structure s : {Structure::AtoB, Structure::BtoA, Structure::Confounded})
    CHECK(parse_structure(to_string(s)) == s);
  for (TestMode m : {TestMode::withObs, TestMode::intervOnly})
    CHECK(parse_mode(to_string(m)) == m);
  for (DmaxRule r : {DmaxRule::supremumKl, DmaxRule::logRatio})
    CHECK(parse_dmax_rule(to_string(r)) == r);
  CHECK_THROWS_AS(parse_structure("AB"), std::invalid_argument);
}
