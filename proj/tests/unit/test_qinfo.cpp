#include <doctest.h>

#include <bit>
#include <cmath>
#include <numbers>

#include "basis.hpp"
#include "brute_force.hpp"
#include "dynamics.hpp"
#include "error.hpp"
#include "linalg.hpp"
#include "operators.hpp"
#include "qinfo.hpp"
#include "spectral.hpp"

using namespace dmbl;
using std::numbers::ln2;
using std::numbers::pi;

namespace {

struct Setup {
  std::vector<double> fields;
  ComplexVector xi;
  BranchState branches;
};

Setup evolve(int sites, double h, double lambda, double t, std::uint64_t seed, double eps = 0.5) {
  Setup s;
  const auto r = DisorderRealization::draw(sites, h, seed);
  s.fields = r.fields;
  const SectorBasis basis(sites, default_sector_n_up(sites));
  const auto sel = select_eigenstate(build_env_hamiltonian(basis, r), eps);
  s.xi = embed_full(sel.state, basis).cast<cplx>();
  if (lambda == 0.0) {
    s.branches = propagate_lambda0(s.xi, sites, t);
  } else {
    KrylovOptions tight;
    tight.tol = 1e-12;
    s.branches = propagate_krylov(s.xi, lambda, build_env_hamiltonian_full(sites, r), build_hse(sites), t, tight);
  }
  return s;
}

BranchState ghz(int sites) {
  BranchState b;
  b.sites = sites;
  const Eigen::Index dim = Eigen::Index{1} << sites;
  b.phi_plus = ComplexVector::Zero(dim);
  b.phi_minus = ComplexVector::Zero(dim);
  b.phi_plus[0] = 1.0;
  b.phi_minus[dim - 1] = 1.0;
  return b;
}

}  // namespace

TEST_CASE("site sets") {
  const int sites[] = {1, 3, 4};
  const auto f = SiteSet::from_sites(sites, 6);
  CHECK(f.mask() == 0b1101u);
  CHECK(f.size() == 3);
  CHECK(f.sites() == std::vector<int>{1, 3, 4});
  CHECK(f.complement().mask() == 0b110010u);
  const int out_of_range[] = {0};
  const int twice[] = {2, 2};
  for (auto bad : {std::span<const int>(out_of_range), std::span<const int>(twice)}) {
    try {
      SiteSet::from_sites(bad, 6);
      FAIL("expected invalid-site-set");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::invalid_site_set);
    }
  }
  CHECK_THROWS_AS(SiteSet::from_mask(1u << 6, 6), Error);
}

TEST_CASE("von Neumann entropy") {
  ComplexMatrix pure = ComplexMatrix::Zero(2, 2);
  pure(0, 0) = 1.0;
  CHECK(vn_entropy(pure) == 0.0);
  CHECK(vn_entropy(ComplexMatrix::Identity(2, 2) * 0.5) == doctest::Approx(ln2));
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 0.75;
  d(1, 1) = 0.25;
  CHECK(vn_entropy(d) == doctest::Approx(-0.75 * std::log(0.75) - 0.25 * std::log(0.25)).epsilon(1e-14));
  CHECK(vn_entropy(d) == doctest::Approx(0.5623351446));
}

TEST_CASE("reduced states from branches") {
  const int sites = 6;
  const auto s = evolve(sites, 5.0, 0.0, pi / 4, 31);
  const auto oracle_run = oracle::run(sites, s.fields, s.xi, 0.0, pi / 4);
  const auto d = decoherence_factor(s.branches);

  SUBCASE("empty fragment is the qubit state") {
    const auto rho = reduced_system_fragment(s.branches, SiteSet::from_mask(0, sites));
    REQUIRE(rho.dim() == 2);
    CHECK(std::abs(rho.matrix(0, 0) - 0.5) < 1e-14);
    CHECK(std::abs(rho.matrix(1, 1) - 0.5) < 1e-14);
    CHECK(std::abs(rho.matrix(0, 1) - d.r / 2.0) < 1e-14);
  }
  SUBCASE("full fragment is pure") {
    const auto rho = reduced_system_fragment(s.branches, SiteSet::all(sites));
    CHECK(std::abs((rho.matrix * rho.matrix).trace().real() - 1.0) < 1e-9);
  }
  SUBCASE("fragment {1,2} against the global density matrix") {
    const int f[] = {1, 2};
    const auto rho = reduced_system_fragment(s.branches, SiteSet::from_sites(f, sites));
    CHECK((rho.matrix - oracle_run.rho_sf(0b11u)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("density matrix invariants") {
    for (std::uint32_t m : {0b1u, 0b101u, 0b110110u}) {
      const auto rho = reduced_system_fragment(s.branches, SiteSet::from_mask(m, sites));
      CHECK(std::abs(rho.matrix.trace() - cplx{1.0, 0.0}) < 1e-9);
      CHECK((rho.matrix - rho.matrix.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
      CHECK(linalg::hermitian_eigenvalues(rho.matrix).minCoeff() > -1e-9);
      const auto rho_f = trace_out_system(rho);
      CHECK(!rho_f.includes_system);
      CHECK(rho_f.dim() == rho.dim() / 2);
      // Pure global state: S(SF) = S(complement of SF).
      const auto rho_c = trace_out_system(reduced_system_fragment(s.branches, SiteSet::from_mask(m, sites).complement()));
      CHECK(std::abs(vn_entropy(rho) - vn_entropy(rho_c)) < 1e-8);
    }
  }
}

TEST_CASE("mutual information against the brute-force pipeline") {
  for (int sites : {3, 4, 5, 6}) {
    for (double lambda : {0.0, 0.3}) {
      for (double t : {pi / 4, 1.0}) {
        const auto s = evolve(sites, 2.0, lambda, t, 500 + sites);
        const auto ref = oracle::run(sites, s.fields, s.xi, lambda, t);
        double worst_rho = 0.0, worst_mi = 0.0;
        for (std::uint32_t m = 0; m < (1u << sites); ++m) {
          const auto f = SiteSet::from_mask(m, sites);
          worst_rho = std::max(worst_rho, (reduced_system_fragment(s.branches, f).matrix - ref.rho_sf(m)).cwiseAbs().maxCoeff());
          if (m) worst_mi = std::max(worst_mi, std::abs(mutual_information(s.branches, f) - ref.mutual_information(m)));
        }
        CHECK(worst_rho < 1e-10);
        CHECK(worst_mi < 1e-8);
        const auto curve = lack_of_redundancy(s.branches);
        CHECK(curve.lack_of_redundancy == doctest::Approx(ref.lack_of_redundancy()).epsilon(1e-8));
        const auto mi = ref.averaged_mi();
        for (int l = 1; l <= sites; ++l)
          CHECK(std::abs(curve.mi_avg[static_cast<std::size_t>(l - 1)] - mi[static_cast<std::size_t>(l - 1)]) < 1e-8);
      }
    }
  }
}

TEST_CASE("mutual information limits") {
  const int sites = 6;
  SUBCASE("no correlations at t = 0") {
    const auto s = evolve(sites, 1.0, 0.0, 0.0, 3);
    for (std::uint32_t m = 1; m < 64; m += 7) CHECK(std::abs(mutual_information(s.branches, SiteSet::from_mask(m, sites))) < 1e-12);
  }
  SUBCASE("whole environment carries 2 H_S") {
    for (double lambda : {0.0, 0.3}) {
      const auto s = evolve(sites, 3.0, lambda, 0.9, 4);
      const double hs = decoherence_factor(s.branches).system_entropy;
      CHECK(std::abs(mutual_information(s.branches, SiteSet::all(sites)) - 2 * hs) < 1e-6);
      const auto avg = averaged_mi(s.branches, sites, ExactEnumeration{});
      CHECK(std::abs(avg.mean - 2 * hs) < 1e-6);
      CHECK(avg.stderr == 0.0);
      CHECK(avg.evaluations == 1);
    }
  }
  SUBCASE("GHZ branches") {
    const auto b = ghz(sites);
    for (std::uint32_t m = 1; m < 63; ++m) CHECK(mutual_information(b, SiteSet::from_mask(m, sites)) == doctest::Approx(ln2));
    for (int l = 1; l < sites; ++l) {
      const auto avg = averaged_mi(b, l, ExactEnumeration{});
      CHECK(avg.mean == doctest::Approx(ln2));
      CHECK(avg.stderr == 0.0);
    }
    const auto curve = lack_of_redundancy(b);
    CHECK(std::abs(curve.lack_of_redundancy) < 1e-8);
    CHECK(curve.mi_rescaled.back() == doctest::Approx(2.0));
  }
  SUBCASE("equal branches have no redundancy measure") {
    const auto s = evolve(sites, 1.0, 0.0, 0.0, 3);
    try {
      lack_of_redundancy(s.branches);
      FAIL("expected degenerate-system-entropy");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::degenerate_system_entropy);
    }
  }
}

TEST_CASE("bounds and monotonicity of the averaged curve") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const int sites = 8;
    const auto s = evolve(sites, 0.5 + seed, seed % 2 ? 0.0 : 0.3, pi / 4, seed);
    const double hs = decoherence_factor(s.branches).system_entropy;
    for (std::uint32_t m = 1; m < 256; m += 5) {
      const double mi = mutual_information(s.branches, SiteSet::from_mask(m, sites));
      CHECK(mi >= -1e-10);
      CHECK(mi <= 2 * hs + 1e-8);
    }
    const auto curve = lack_of_redundancy(s.branches);
    for (std::size_t l = 1; l < curve.mi_avg.size(); ++l) CHECK(curve.mi_avg[l] >= curve.mi_avg[l - 1] - 1e-8);
  }
}

TEST_CASE("complement identity reproduces direct enumeration") {
  for (int sites : {7, 8, 10}) {
    const auto s = evolve(sites, 4.0, 0.0, pi / 4, 70 + sites);
    FragmentPolicy direct;
    direct.use_complement_identity = false;
    const auto a = lack_of_redundancy(s.branches);
    const auto b = lack_of_redundancy(s.branches, direct);
    for (std::size_t l = 0; l < a.mi_avg.size(); ++l) CHECK(std::abs(a.mi_avg[l] - b.mi_avg[l]) < 1e-10);
    CHECK(a.lack_of_redundancy == doctest::Approx(b.lack_of_redundancy).epsilon(1e-10));
  }
}

TEST_CASE("sampled fragment averages") {
  const int sites = 10;
  const auto s = evolve(sites, 1.0, 0.0, pi / 4, 10, 0.3);
  const auto exact = averaged_mi(s.branches, 3, ExactEnumeration{});
  CHECK(exact.evaluations == 120);
  CHECK(exact.exact);
  const auto sampled = averaged_mi(s.branches, 3, UniformSample{60, 99});
  CHECK(!sampled.exact);
  CHECK(sampled.evaluations == 60);
  CHECK(sampled.stderr > 0.0);
  CHECK(std::abs(sampled.mean - exact.mean) < 3 * sampled.stderr);
  const auto again = averaged_mi(s.branches, 3, UniformSample{60, 99});
  CHECK(again.mean == sampled.mean);
  // Full-population sample is the exact mean with vanishing correction.
  const auto all = averaged_mi(s.branches, 3, UniformSample{120, 5});
  CHECK(all.mean == doctest::Approx(exact.mean).epsilon(1e-12));
  CHECK(all.stderr == 0.0);
  try {
    averaged_mi(s.branches, 3, UniformSample{121, 1});
    FAIL("expected sample-count-exceeds-population");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::sample_count_exceeds_population);
  }
}

TEST_CASE("fragment policy") {
  FragmentPolicy p;
  CHECK(std::holds_alternative<ExactEnumeration>(p.mode_for(14, 7)));
  const auto m = p.mode_for(16, 8);
  REQUIRE(std::holds_alternative<UniformSample>(m));
  CHECK(std::get<UniformSample>(m).count == 2000);
  p.exact_limit = 10;
  p.sample_cap = 500;
  const auto small = p.mode_for(6, 3);
  REQUIRE(std::holds_alternative<UniformSample>(small));
  CHECK(std::get<UniformSample>(small).count == 20);
}

TEST_CASE("colex unranking enumerates subsets in ascending mask order") {
  for (int n : {5, 8}) {
    for (int l = 1; l <= n; ++l) {
      std::uint32_t previous = 0;
      const auto count = binomial(n, l);
      for (std::uint64_t r = 0; r < count; ++r) {
        const auto mask = unrank_combination(r, n, l);
        CHECK(std::popcount(mask) == l);
        CHECK(mask < (1u << n));
        if (r) CHECK(mask > previous);
        previous = mask;
      }
    }
  }
}

TEST_CASE("sampled redundancy curves stay close to exact ones") {
  const int sites = 10;
  const auto s = evolve(sites, 5.0, 0.0, pi / 4, 12);
  FragmentPolicy sampled;
  sampled.exact_limit = 50;
  sampled.sample_cap = 40;
  const auto exact = lack_of_redundancy(s.branches);
  const auto approx = lack_of_redundancy(s.branches, sampled);
  for (std::size_t l = 0; l < exact.mi_avg.size(); ++l) {
    if (approx.exact[l]) {
      CHECK(approx.mi_avg[l] == doctest::Approx(exact.mi_avg[l]).epsilon(1e-10));
    } else {
      CHECK(std::abs(approx.mi_avg[l] - exact.mi_avg[l]) < 4 * approx.mi_stderr[l] + 1e-12);
    }
  }
}
