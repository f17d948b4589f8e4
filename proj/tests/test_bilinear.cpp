#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "revhardy/bilinear.hpp"

using namespace revhardy;

namespace {

SWParams canonical() { return sw_param_check(PolarSpace::euclidean(1), -1.0, -1.0, -0.3, -0.4); }

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::NonConvergent;
}

}  // namespace

TEST(SteinWeissParams, CanonicalCase) {
  const auto sp = canonical();
  EXPECT_NEAR(sp.lambda, -0.3, 1e-15);
  EXPECT_TRUE(sp.case_a);
  EXPECT_FALSE(sp.case_b);
  EXPECT_EQ(sp.active, SWCase::A);
  EXPECT_FALSE(sp.diagonal_divergent());
  EXPECT_NEAR(sp.balance_residual, 0.0, 1e-15);
}

TEST(SteinWeissParams, Rejections) {
  const auto line = PolarSpace::euclidean(1);
  EXPECT_EQ(kind_of([&] { sw_param_check(line, -1.0, -1.0, -1.0, -1.0); }), ErrorKind::InvalidParams);
  EXPECT_EQ(kind_of([&] { sw_param_check(line, -1.0, -0.5, 0.0, 0.0); }), ErrorKind::InvalidParams);
  EXPECT_EQ(kind_of([&] { sw_param_check(PolarSpace::hyperbolic(2), -1.0, -1.0, -0.3, -0.4); }), ErrorKind::InvalidParams);
  EXPECT_EQ(kind_of([&] { sw_param_check(line, -1.0, -1.0, NAN, -0.4); }), ErrorKind::InvalidParams);
}

TEST(SteinWeissParams, LambdaSolvesBalance) {
  const auto sp = sw_param_check(PolarSpace::heisenberg(), -1.0, -2.0, -1.0, -1.5);
  EXPECT_NEAR(1.0 / sp.exps.p_conj + 1.0 / sp.exps.q + (sp.alpha + sp.beta + sp.lambda) / 4.0, 0.0, 1e-14);
  EXPECT_LT(sp.lambda, 0.0);
}

TEST(HlsParams, DerivedLambdaAndRejections) {
  const auto line = PolarSpace::euclidean(1);
  const auto h = hls_param_check(line, -1.0, -2.0);
  EXPECT_TRUE(h.valid);
  EXPECT_NEAR(h.derived_lambda, -1.5, 1e-15);
  EXPECT_TRUE(h.diagonal_divergent);
  EXPECT_TRUE(h.params.hls);
  EXPECT_EQ(kind_of([&] { hls_param_check(line, -1.0, -1.0); }), ErrorKind::InvalidParams);
  EXPECT_EQ(kind_of([&] { hls_param_check(line, -1.0, -0.5); }), ErrorKind::InvalidParams);
  EXPECT_EQ(kind_of([&] { hls_param_check(line, -1.0, -2.0, -1.0); }), ErrorKind::InvalidParams);
  EXPECT_NO_THROW(hls_param_check(line, -1.0, -2.0, -1.5));
}

TEST(HlsParams, StrictOrderAlwaysGivesTrivialRegime) {
  for (double p : {-0.2, -1.0, -3.0}) {
    for (double gap : {0.01, 0.5, 4.0}) {
      const auto h = hls_param_check(PolarSpace::heisenberg(), p, p - gap);
      EXPECT_LT(h.derived_lambda, -4.0);
    }
  }
}

TEST(LowerConstant, CanonicalValue) {
  const auto lc = sw_lower_constant(canonical(), SWCase::A);
  EXPECT_NEAR(lc.D, 5.0, 1e-12);
  EXPECT_NEAR(lc.hardy_factor, 0.25, 1e-15);
  EXPECT_NEAR(lc.kernel_factor, std::pow(2.0, -0.3), 1e-15);
  EXPECT_NEAR(lc.value, 1.015315, 1e-6);
  EXPECT_EQ(kind_of([] { sw_lower_constant(canonical(), SWCase::B); }), ErrorKind::InadmissibleExponent);
  const auto best = best_lower_constant(canonical());
  ASSERT_TRUE(best.has_value());
  EXPECT_EQ(best->first, SWCase::A);
}

TEST(LowerConstant, ReducedHardyWeightsBalance) {
  // the reduced inequality is a balanced power-weight Hardy inequality
  const auto sp = canonical();
  const auto rh = reduced_hardy(sp, SWCase::A);
  EXPECT_FALSE(rh.conjugate);
  const auto& e = sp.exps;
  const double v_dual = rh.v_exponent * (1.0 - e.p_conj);
  EXPECT_NEAR((1.0 + rh.u_exponent) / e.q + (1.0 + v_dual) / e.p_conj, 0.0, 1e-14);
}

TEST(Windows, CanonicalFamilyIsAdmissible) {
  const auto sp = canonical();
  const auto w = sw_windows(sp);
  EXPECT_TRUE(w.tail_divergent);
  const auto fam = sample_sw_family(sp, FamilySpec{10, 7});
  ASSERT_EQ(fam.size(), 10u);
  for (const auto& pr : fam) {
    const auto fin = form_finiteness(sp, pr.f, pr.h);
    EXPECT_TRUE(Finiteness::all(fin.local)) << pr.f.describe() << " " << pr.h.describe();
    EXPECT_TRUE(Finiteness::all(fin.diagonal));
    EXPECT_FALSE(Finiteness::all(fin.tail));
    EXPECT_NO_THROW(counter_norm(sp.space, pr.f.radial(), sp.exps.q_conj));
    EXPECT_NO_THROW(counter_norm(sp.space, pr.h.radial(), sp.exps.p));
  }
}

TEST(CounterNorm, ClosedForms) {
  const auto line = PolarSpace::euclidean(1);
  // f = e^(-|x|/e): (int_R e^(-|x|))^(1/e) = 2^(1/e)
  const double e = 0.5;
  const RadialFunction f([e](double r) { return std::exp(-r / e); }, 0.0, std::nullopt);
  EXPECT_NEAR(counter_norm(line, f, e), std::pow(2.0, 1.0 / e), 1e-9);
  // p = -1, h = 1 + r^2: int (1 + r^2)^-1 = pi
  const RadialFunction h([](double r) { return 1.0 + r * r; }, 0.0, 2.0);
  EXPECT_NEAR(counter_norm(line, h, -1.0), 1.0 / std::acos(-1.0), 1e-9);
  EXPECT_THROW(counter_norm(line, h, 1.0), Error);
  EXPECT_THROW(counter_norm(line, h, 0.0), Error);
  EXPECT_THROW(counter_norm(line, RadialFunction::indicator(0.0, 1.0), -1.0), Error);
  EXPECT_THROW(counter_norm(line, RadialFunction::constant(1.0), -1.0), Error);
}

TEST(Form, UnitKernelSeparates) {
  const auto sp = canonical();
  const PiecewisePowerFunction f(0.2, -3.0, 1.5), h(0.0, 2.0, 0.7);
  McSpec mc;
  mc.samples = 400'000;
  mc.unit_kernel = true;
  const auto fr = sw_form(sp, f, h, mc);
  ASSERT_FALSE(fr.divergent);
  EXPECT_TRUE(fr.truncated);
  const double R = mc.truncation_radius;
  const double fx = polar_integrate(sp.space, f.radial() * RadialFunction::power(sp.alpha), 0.0, R);
  const double hy = polar_integrate(sp.space, h.radial() * RadialFunction::power(sp.beta), 0.0, R);
  EXPECT_LT(std::abs(fr.estimate.mean - fx * hy), 4.0 * fr.estimate.std_error);
  EXPECT_LT(fr.estimate.relative_error(), 0.02);
}

TEST(Form, GroupAndCoordinateKernelsAgreeOnAbelianGroups) {
  const auto sp = canonical();
  const auto fam = sample_sw_family(sp, FamilySpec{2, 3});
  McSpec mc;
  mc.samples = 50'000;
  const auto a = sw_form(sp, fam[0].f, fam[0].h, mc);
  mc.euclidean_kernel = true;
  const auto b = sw_form(sp, fam[0].f, fam[0].h, mc);
  EXPECT_NEAR(a.estimate.mean / b.estimate.mean, 1.0, 1e-12);
}

TEST(Form, ProductAndKernelAdaptedSamplersAgree) {
  const auto sp = sw_param_check(PolarSpace::euclidean(1), -1.0, -1.0, -0.5, -0.2);
  const PiecewisePowerFunction f(0.8, -3.0, 1.0), h(0.3, 1.5, 1.0);
  McSpec mc;
  mc.samples = 400'000;
  const auto k = sw_form(sp, f, h, mc);
  mc.mode = PairSampler::Mode::Product;
  const auto p = sw_form(sp, f, h, mc);
  const double se = std::hypot(k.estimate.std_error, p.estimate.std_error);
  EXPECT_LT(std::abs(k.estimate.mean - p.estimate.mean), 4.0 * se);
}

TEST(Form, DivergenceIsCertifiedWithoutSampling) {
  const auto h = hls_param_check(PolarSpace::euclidean(1), -1.0, -2.0);
  const PiecewisePowerFunction f(1.0, -3.0, 1.0), g(0.5, 2.0, 1.0);
  const auto fr = sw_form(h.params, f, g, McSpec{});
  EXPECT_TRUE(fr.divergent);
  EXPECT_EQ(fr.value(), kInf);
  const auto sp = canonical();
  const auto local = sw_form(sp, PiecewisePowerFunction(-0.9, -3.0, 1.0), PiecewisePowerFunction(0.0, 2.0, 1.0), McSpec{});
  EXPECT_TRUE(local.divergent);
}

TEST(Chain, CanonicalStepsHold) {
  const auto sp = canonical();
  for (const auto& pr : sample_sw_family(sp, FamilySpec{3, 11})) {
    const auto steps = chain_check(sp, pr.f, pr.h, SWCase::A);
    ASSERT_EQ(steps.size(), 5u);
    for (const auto& s : steps) {
      EXPECT_TRUE(s.holds) << s.name << ": " << s.detail;
      EXPECT_FALSE(s.skipped) << s.name;
    }
  }
}

TEST(Chain, HeisenbergSkipsLineOnlySteps) {
  const auto sp = sw_param_check(PolarSpace::heisenberg(), -1.0, -1.0, -1.0, -1.5);
  const auto pr = sample_sw_family(sp, FamilySpec{1, 5}).front();
  ChainOptions opt;
  opt.kernel_pairs = 2000;
  const auto best = best_lower_constant(sp);
  ASSERT_TRUE(best.has_value());
  const auto steps = chain_check(sp, pr.f, pr.h, best->first, opt);
  std::size_t skipped = 0;
  for (const auto& s : steps) {
    EXPECT_TRUE(s.holds) << s.name << ": " << s.detail;
    skipped += s.skipped;
  }
  EXPECT_EQ(skipped, 2u);
}

TEST(Verify, CanonicalSmallRunIsDeterministic) {
  const auto sp = canonical();
  const auto fam = sample_sw_family(sp, FamilySpec{2, 7});
  SWOptions opt;
  opt.mc.samples = 100'000;
  const auto a = verify_sw(sp, fam, opt);
  opt.mc.threads = 1;
  const auto b = verify_sw(sp, fam, opt);
  EXPECT_EQ(a.verdict, Verdict::Verified);
  EXPECT_EQ(a.verdict, b.verdict);
  ASSERT_EQ(a.pairs.size(), b.pairs.size());
  for (std::size_t i = 0; i < a.pairs.size(); ++i) {
    ASSERT_EQ(a.pairs[i].forms.size(), 2u);
    for (std::size_t k = 0; k < 2; ++k) EXPECT_EQ(a.pairs[i].forms[k].estimate.mean, b.pairs[i].forms[k].estimate.mean);
  }
  EXPECT_TRUE(a.truncated);
  EXPECT_FALSE(a.warnings.empty());
  EXPECT_GE(a.min_ratio, a.constructive_lower);
}

TEST(Verify, SeedsMustBeIndependent) {
  EXPECT_EQ(derive_seed(9, 0), 9u);
  EXPECT_NE(derive_seed(9, 1), 9u);
  EXPECT_NE(derive_seed(9, 1), derive_seed(9, 2));
  SWOptions opt;
  opt.seeds = 1;
  EXPECT_THROW(verify_sw(canonical(), sample_sw_family(canonical(), FamilySpec{1, 1}), opt), Error);
  EXPECT_THROW(verify_sw(canonical(), {}, SWOptions{}), Error);
}

TEST(Verify, HlsCertificateGrowsUnderRefinement) {
  const auto h = hls_param_check(PolarSpace::euclidean(1), -1.0, -2.0);
  const auto fam = sample_sw_family(h.params, FamilySpec{1, 7});
  SWOptions opt;
  opt.refinement_samples = 100'000;
  const auto rep = verify_sw(h.params, fam, opt);
  EXPECT_EQ(rep.verdict, Verdict::TriviallyHolds);
  ASSERT_EQ(rep.divergence.size(), 1u);
  const auto& lv = rep.divergence[0].levels;
  ASSERT_EQ(lv.size(), 4u);
  for (std::size_t k = 0; k + 1 < lv.size(); ++k) {
    EXPECT_NEAR(lv[k + 1].excision, lv[k].excision / 4.0, 1e-15);
    EXPECT_GT(lv[k + 1].estimate.mean, lv[k].estimate.mean);
  }
  EXPECT_FALSE(rep.warnings.empty());
}
