#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <bit>
#include <cmath>

#include "basis.hpp"
#include "brute_force.hpp"
#include "error.hpp"
#include "linalg.hpp"
#include "operators.hpp"

using namespace dmbl;

namespace {

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("disorder draws are reproducible and bounded") {
  const auto a = DisorderRealization::draw(12, 3.0, 42);
  const auto b = DisorderRealization::draw(12, 3.0, 42);
  const auto c = DisorderRealization::draw(12, 3.0, 43);
  REQUIRE(a.fields.size() == 12);
  CHECK(a.fields == b.fields);
  CHECK(a.fields != c.fields);
  for (double f : a.fields) CHECK(std::abs(f) <= 3.0);
  CHECK_THROWS_AS(DisorderRealization::draw(4, -1.0, 1), Error);
}

TEST_CASE("field draws consume L values from the seeded engine") {
  // Same seed, longer chain: the shared prefix must agree.
  const auto short_chain = DisorderRealization::draw(6, 2.0, 9);
  const auto long_chain = DisorderRealization::draw(9, 2.0, 9);
  for (std::size_t k = 0; k < 6; ++k) CHECK(short_chain.fields[k] == long_chain.fields[k]);
}

TEST_CASE("full-space environment Hamiltonian matches Kronecker products") {
  for (int sites : {3, 4, 5, 6}) {
    const auto r = DisorderRealization::draw(sites, 2.5, 100 + sites);
    const auto h = build_env_hamiltonian_full(sites, r);
    const auto ref = oracle::heisenberg_ring(sites, r.fields);
    CHECK(max_abs(h.to_dense() - ref) < 1e-14);
    CHECK(h.hermiticity_residual() < 1e-12);
  }
}

TEST_CASE("four-site clean ring ground state") {
  const auto h = build_env_hamiltonian_full(4, DisorderRealization::uniform(4, 0.0));
  const auto e = linalg::hermitian_eigenvalues(h.to_dense());
  CHECK(e[0] == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("environment Hamiltonian conserves total Sz") {
  for (int sites : {4, 7}) {
    const auto h = build_env_hamiltonian_full(sites, DisorderRealization::draw(sites, 1.0, 5));
    const auto sz = build_total_sz(sites);
    const ComplexMatrix comm = h.to_dense() * sz.to_dense() - sz.to_dense() * h.to_dense();
    CHECK(comm.norm() < 1e-10);
    const ComplexMatrix comm_se = build_hse(sites).to_dense() * sz.to_dense() - sz.to_dense() * build_hse(sites).to_dense();
    CHECK(comm_se.norm() > 1.0);
  }
}

TEST_CASE("sector Hamiltonian is the projection of the full one") {
  for (int sites = 3; sites <= 8; ++sites) {
    const SectorBasis basis(sites, default_sector_n_up(sites));
    const auto r = DisorderRealization::draw(sites, 4.0, 7 * sites);
    const auto sector = build_env_hamiltonian(basis, r);
    const auto full = oracle::heisenberg_ring(sites, r.fields);
    REQUIRE(sector.dim() == basis.size());
    double dev = 0.0;
    for (std::size_t i = 0; i < basis.size(); ++i)
      for (std::size_t j = 0; j < basis.size(); ++j)
        dev = std::max(dev, std::abs(sector.dense()(i, j) - full(basis.config(i), basis.config(j))));
    CHECK(dev < 1e-14);
    CHECK(sector.hermiticity_residual() < 1e-12);
  }
}

TEST_CASE("sector trace equals the summed diagonal energies") {
  const SectorBasis basis(6, 3);
  const auto r = DisorderRealization::draw(6, 5.0, 2024);
  const auto h = build_env_hamiltonian(basis, r);
  double expected = 0.0;
  for (auto c : basis.configs()) {
    for (int k = 0; k < 6; ++k) {
      const double sk = (c >> k & 1u) ? 0.5 : -0.5;
      const double sn = (c >> ((k + 1) % 6) & 1u) ? 0.5 : -0.5;
      expected += sk * sn + r.fields[static_cast<std::size_t>(k)] * sk;
    }
  }
  CHECK(h.dense().trace() == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("environment Hamiltonian requires L >= 3") {
  CHECK_THROWS_AS(build_env_hamiltonian_full(2, DisorderRealization::uniform(2, 0.0)), Error);
  CHECK_THROWS_AS(build_env_hamiltonian(SectorBasis(2, 1), DisorderRealization::uniform(2, 0.0)), Error);
  CHECK_THROWS_AS(build_env_hamiltonian_full(4, DisorderRealization::uniform(3, 0.0)), Error);
}

TEST_CASE("interaction operator") {
  const auto one = build_hse(1).to_dense();
  CHECK(one(0, 0) == cplx{0.0, 0.0});
  CHECK(one(0, 1) == cplx{0.0, -1.0});
  CHECK(one(1, 0) == cplx{0.0, 1.0});
  CHECK(one(1, 1) == cplx{0.0, 0.0});

  const auto e = linalg::hermitian_eigenvalues(build_hse(3).to_dense());
  const double expected[] = {-3, -1, -1, -1, 1, 1, 1, 3};
  for (int i = 0; i < 8; ++i) CHECK(e[i] == doctest::Approx(expected[i]).epsilon(1e-12));

  for (int sites : {3, 6}) {
    const auto h = build_hse(sites);
    CHECK(max_abs(h.to_dense() - oracle::coupling(sites)) < 1e-15);
    CHECK(h.to_dense().real().cwiseAbs().maxCoeff() == 0.0);
    // Sector-supported states have zero expectation.
    const SectorBasis basis(sites, default_sector_n_up(sites));
    const RealVector xi = RealVector::Random(static_cast<Eigen::Index>(basis.size())).normalized();
    const ComplexVector full = embed_full(xi, basis).cast<cplx>();
    CHECK(std::abs(full.dot(h.apply(full))) < 1e-14);
  }
}

TEST_CASE("total Hamiltonian") {
  const int sites = 6;
  const auto r = DisorderRealization::draw(sites, 3.0, 11);
  for (double lambda : {0.0, 0.3}) {
    const auto h = build_total_hamiltonian(sites, r, lambda);
    CHECK(h.dim() == 128);
    CHECK(h.hermiticity_residual() < 1e-12);
    CHECK(max_abs(h.to_dense() - oracle::total_hamiltonian(sites, r.fields, lambda)) < 1e-14);

    const auto env = build_env_hamiltonian_full(sites, r);
    const auto hse = build_hse(sites);
    const ComplexMatrix full = h.to_dense();
    CHECK(max_abs(full.topLeftCorner(64, 64) - build_branch_generator(env, hse, lambda, +1).to_dense()) < 1e-15);
    CHECK(max_abs(full.bottomRightCorner(64, 64) - build_branch_generator(env, hse, lambda, -1).to_dense()) < 1e-15);
    CHECK(max_abs(full.topRightCorner(64, 64)) == 0.0);
  }
  // lambda = 0 leaves only sigma_z (x) H_SE.
  const ComplexMatrix bare = build_total_hamiltonian(sites, r, 0.0).to_dense();
  ComplexMatrix expected = ComplexMatrix::Zero(128, 128);
  const ComplexMatrix hse = oracle::coupling(sites);
  expected.topLeftCorner(64, 64) = hse;
  expected.bottomRightCorner(64, 64) = -hse;
  CHECK(max_abs(bare - expected) == 0.0);
}

TEST_CASE("space tags fix dimensions") {
  CHECK(expected_dimension(SectorSpace{10, 5}) == 252);
  CHECK(expected_dimension(EnvFullSpace{10}) == 1024);
  CHECK(expected_dimension(SystemEnvSpace{10}) == 2048);
  CHECK_THROWS_AS(OperatorMatrix(SectorSpace{4, 2}, RealMatrix::Zero(5, 5)), Error);
}
