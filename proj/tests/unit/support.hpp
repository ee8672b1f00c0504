#ifndef DELTASPEC_TEST_SUPPORT_HPP
#define DELTASPEC_TEST_SUPPORT_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <doctest.h>

#include "deltaspec/geometry.hpp"
#include "deltaspec/mesh.hpp"

namespace testing {

using namespace deltaspec;
using std::numbers::pi;

struct Named {
  std::string label;
  CanonicalGeometry geometry;
  GeometryParams params;
};

/// Every canonical geometry with small, valid parameters.
inline std::vector<Named> canonical(double R = 4.0) {
  GeometryParams g;
  g.box_radius = R;
  std::vector<Named> out;
  out.push_back({"half_plane", CanonicalGeometry::half_plane, g});
  for (double a : {pi / 3, 2 * pi / 3, pi}) {
    GeometryParams w = g;
    w.angle = a;
    out.push_back({"wedge " + std::to_string(a), CanonicalGeometry::wedge, w});
  }
  out.push_back({"star3", CanonicalGeometry::star3, g});
  GeometryParams b = g;
  b.bump = square_bump({0.0, R / 4}, R / 4);
  out.push_back({"line_with_bump", CanonicalGeometry::line_with_bump, b});
  out.push_back({"grid", CanonicalGeometry::grid, g});
  GeometryParams g3 = g;
  g3.nx = 3;
  g3.ny = 2;
  out.push_back({"grid 3x2", CanonicalGeometry::grid, g3});
  GeometryParams wh = g;
  wh.sides = 3;
  out.push_back({"wheel", CanonicalGeometry::wheel, wh});
  GeometryParams in = g;
  in.sides = 8;
  out.push_back({"inclusion", CanonicalGeometry::inclusion, in});
  return out;
}

inline Partition build(const Named& n) { return build_canonical_partition(n.geometry, n.params); }

inline std::shared_ptr<const Mesh> mesh_of(const Partition& p, int levels) {
  return std::make_shared<const Mesh>(triangulate(p, levels));
}

inline Eigen::VectorXd uniform_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

/// Checks that `fn` throws deltaspec::Error whose message contains `needle`.
inline void check_throws_containing(const std::function<void()>& fn, const std::string& needle) {
  try {
    fn();
    FAIL("expected an exception mentioning '" << needle << "'");
  } catch (const Error& e) {
    const std::string what = e.what();
    INFO("message: " << what);
    CHECK(what.find(needle) != std::string::npos);
  }
}

}  // namespace testing

#endif  // DELTASPEC_TEST_SUPPORT_HPP
