#include <cmath>
#include <stdexcept>
#include <random>
#include <sstream>

#include "doctest.h"
#include "eerds/mesh.hpp"

using namespace eerds;

TEST_CASE("uniform mesh construction and boundary classification") {
  const MeshHandle m = build_uniform_mesh(0.0, 1.0, 3, BoundarySpec::dirichlet(),
                                          BoundarySpec::robin(1.0));
  CHECK(m->node_count() == 3);
  CHECK(m->node(1) == doctest::Approx(0.5));
  CHECK(m->classification() == BoundaryCase::SomeDirichlet);

  const MeshHandle n = build_uniform_mesh(0.0, 1.0, 11, BoundarySpec::neumann(),
                                          BoundarySpec::neumann());
  CHECK(n->classification() == BoundaryCase::PureNeumann);

  const MeshHandle r = build_uniform_mesh(0.0, 1.0, 11, BoundarySpec::robin(1.0),
                                          BoundarySpec::robin(2.0));
  CHECK(r->classification() == BoundaryCase::PureRobin);
  CHECK(r->robin_weight_sum() == doctest::Approx(3.0));

  // Zero Robin weights on both ends degenerate to the pure Neumann space.
  const MeshHandle z = build_uniform_mesh(0.0, 1.0, 5, BoundarySpec::robin(0.0),
                                          BoundarySpec::robin(0.0));
  CHECK(z->classification() == BoundaryCase::PureNeumann);

  CHECK_THROWS_AS(build_uniform_mesh(1.0, 0.0, 5, BoundarySpec::neumann(),
                                     BoundarySpec::neumann()),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_uniform_mesh(0.0, 1.0, 1, BoundarySpec::neumann(),
                                     BoundarySpec::neumann()),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_uniform_mesh(0.0, 1.0, 5, BoundarySpec::robin(-1.0),
                                     BoundarySpec::neumann()),
                  std::invalid_argument);
}

TEST_CASE("quadrature: exactness and order") {
  const MeshHandle m101 = build_uniform_mesh(0.0, 1.0, 101, BoundarySpec::neumann(),
                                             BoundarySpec::neumann());
  CHECK(integrate(Field(m101, 1.0)) == doctest::Approx(1.0).epsilon(1e-15));

  Field x(m101);
  for (int j = 0; j < x.size(); ++j) x[j] = m101->node(j);
  CHECK(integrate(x) == doctest::Approx(0.5).epsilon(1e-15));
  // Products of interpolants are integrated exactly as well.
  CHECK(integrate(x, x) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));

  const MeshHandle m11 = build_uniform_mesh(0.0, 1.0, 11, BoundarySpec::neumann(),
                                            BoundarySpec::neumann());
  Field xsq(m11);
  for (int j = 0; j < xsq.size(); ++j) xsq[j] = m11->node(j) * m11->node(j);
  CHECK(std::abs(integrate(xsq) - 1.0 / 3.0) <= 1e-2);
}

TEST_CASE("interpolation error decays at second order") {
  double prev = 0.0;
  for (int level = 0; level < 3; ++level) {
    const int n = 20 * (1 << level) + 1;
    const MeshHandle m = build_uniform_mesh(0.0, 1.0, n, BoundarySpec::neumann(),
                                            BoundarySpec::neumann());
    // L2 distance between sin(pi x) and its interpolant, via a fine probe.
    double err = 0.0;
    const int probes_per_element = 8;
    for (int e = 0; e < m->element_count(); ++e) {
      const double h = m->element_size(e);
      for (int p = 0; p < probes_per_element; ++p) {
        const double t = (p + 0.5) / probes_per_element;
        const double xx = m->node(e) + t * h;
        const double interp = (1.0 - t) * std::sin(M_PI * m->node(e)) +
                              t * std::sin(M_PI * m->node(e + 1));
        const double d = std::sin(M_PI * xx) - interp;
        err += d * d * h / probes_per_element;
      }
    }
    err = std::sqrt(err);
    if (level > 0) {
      const double rate = std::log2(prev / err);
      CHECK(rate == doctest::Approx(2.0).epsilon(0.1));
    }
    prev = err;
  }
}

TEST_CASE("norms: triangle inequality and absolute homogeneity") {
  const MeshHandle m = build_uniform_mesh(0.0, 2.0, 33, BoundarySpec::neumann(),
                                          BoundarySpec::neumann());
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  for (int k = 0; k < 25; ++k) {
    Field a(m), b(m);
    for (int j = 0; j < a.size(); ++j) {
      a[j] = unif(rng);
      b[j] = unif(rng);
    }
    Field sum = a;
    sum += b;
    for (auto norm : {l2_norm, linf_norm, l1_norm}) {
      CHECK(norm(sum) <= norm(a) + norm(b) + 1e-12);
    }
    const double s = unif(rng);
    Field scaled = a;
    scaled *= s;
    CHECK(l2_norm(scaled) == doctest::Approx(std::abs(s) * l2_norm(a)));
    CHECK(h1_seminorm(scaled) == doctest::Approx(std::abs(s) * h1_seminorm(a)));
  }
}

TEST_CASE("mesh mismatch is rejected") {
  const MeshHandle a = build_uniform_mesh(0.0, 1.0, 5, BoundarySpec::neumann(),
                                          BoundarySpec::neumann());
  const MeshHandle b = build_uniform_mesh(0.0, 1.0, 5, BoundarySpec::neumann(),
                                          BoundarySpec::neumann());
  CHECK_THROWS_AS(integrate(Field(a, 1.0), Field(b, 1.0)), std::invalid_argument);
}

TEST_CASE("csv serialization carries headers and node rows") {
  const MeshHandle m = build_uniform_mesh(0.0, 1.0, 4, BoundarySpec::neumann(),
                                          BoundarySpec::neumann());
  Field f(m, 2.0);
  std::ostringstream os;
  write_csv(os, {"value"}, {&f});
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "x,value");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 4);
}

TEST_CASE("species field charge density") {
  const MeshHandle m = build_uniform_mesh(0.0, 1.0, 5, BoundarySpec::neumann(),
                                          BoundarySpec::neumann());
  SpeciesField c(m, 2, {-1.0, 1.0});
  c.species(0).fill(2.0);
  c.species(1).fill(5.0);
  const Field rho = c.charge_density();
  for (int j = 0; j < rho.size(); ++j) CHECK(rho[j] == doctest::Approx(3.0));
}
