#include <catch2/catch_amalgamated.hpp>

#include <cfem/mesh.hpp>

using namespace cfem;
using Catch::Approx;

namespace {

double triangle_area_sum(const TriangleMesh& m) {
	double s = 0;
	for (const Triangle& t : m.triangles) {
		s += triangle_area(m.vertices[t.v[0]], m.vertices[t.v[1]], m.vertices[t.v[2]]);
	}
	return s;
}

}  // namespace

TEST_CASE("domain spec validation", "[mesh]") {
	CHECK_THROWS_AS(make_domain(0.0), std::invalid_argument);
	CHECK_THROWS_AS(make_domain(-1.0), std::invalid_argument);
	CHECK_THROWS_AS(make_domain(2.0 * M_PI), std::invalid_argument);
	CHECK_THROWS_AS(make_domain(2.0 * M_PI - 1e-13), std::invalid_argument);
	CHECK(make_domain(1.5 * M_PI).lambda == Approx(2.0 / 3.0));
}

TEST_CASE("coarse meshes match the reference vertex counts", "[mesh]") {
	TriangleMesh m34 = build_domain_mesh(make_domain(0.75 * M_PI));
	CHECK(m34.n_vertices() == 19);
	CHECK(m34.n_triangles() == 24);
	CHECK(mesh_size(m34) == Approx(0.5).epsilon(1e-14));
	CHECK(m34.corners.size() == 4);
	CHECK(triangle_area_sum(m34) == Approx(1.5).epsilon(1e-13));
	CHECK(boundary_perimeter(m34) == Approx(4.0 + std::sqrt(2.0)).epsilon(1e-13));

	TriangleMesh m32 = build_domain_mesh(make_domain(1.5 * M_PI));
	CHECK(m32.n_vertices() == 33);
	CHECK(m32.n_triangles() == 48);
	CHECK(mesh_size(m32) == Approx(0.5).epsilon(1e-14));
	CHECK(m32.corners.size() == 6);
	CHECK(triangle_area_sum(m32) == Approx(3.0).epsilon(1e-13));
	CHECK(boundary_perimeter(m32) == Approx(8.0).epsilon(1e-13));

	double omega = 355.0 * M_PI / 180.0;
	double alpha = 2.0 * M_PI - omega;
	TriangleMesh m355 = build_domain_mesh(make_domain(omega));
	CHECK(std::abs(m355.n_vertices() - 46) <= 5);  // within 10% of the reference count
	CHECK(m355.n_vertices() == 43);
	CHECK(m355.corners.size() == 7);
	CHECK(triangle_area_sum(m355) == Approx(4.0 - 0.5 * std::tan(alpha)).epsilon(1e-12));
	CHECK(boundary_perimeter(m355) ==
	      Approx(9.0 - std::tan(alpha) + 1.0 / std::cos(alpha)).epsilon(1e-12));
}

TEST_CASE("square test mesh", "[mesh]") {
	TriangleMesh sq = build_square_mesh(1.0);
	CHECK(sq.n_vertices() == 13);
	CHECK(sq.n_triangles() == 16);
	CHECK(sq.n_boundary() == 8);
	CHECK(mesh_size(sq) == Approx(1.0));
	CHECK(is_conforming(sq));
	// ccw traversal: signed area of the boundary polygon is positive
	double area2 = 0;
	for (const BoundaryEdge& e : sq.boundary) area2 += cross(sq.vertices[e.a], sq.vertices[e.b]);
	CHECK(0.5 * area2 == Approx(4.0));
}

TEST_CASE("uniform refinement reproduces the reference hierarchy", "[mesh]") {
	TriangleMesh m = build_domain_mesh(make_domain(0.75 * M_PI));
	const long long expect_v[5] = {19, 61, 217, 817, 3169};
	for (int level = 0; level < 5; ++level) {
		if (level > 0) m = refine_uniform(m);
		CHECK(m.n_vertices() == expect_v[level]);
		CHECK(m.level == level);
		CHECK(mesh_size(m) == Approx(0.5 * std::pow(0.5, level)).epsilon(1e-14));
		CHECK(is_conforming(m));
	}

	TriangleMesh l = build_domain_mesh(make_domain(1.5 * M_PI));
	const long long expect_l[4] = {33, 113, 417, 1601};
	for (int level = 0; level < 4; ++level) {
		if (level > 0) l = refine_uniform(l);
		CHECK(l.n_vertices() == expect_l[level]);
		CHECK(mesh_size(l) == Approx(0.5 * std::pow(0.5, level)).epsilon(1e-14));
		CHECK(is_conforming(l));
	}
}

TEST_CASE("refinement provenance gives exact midpoints", "[mesh]") {
	TriangleMesh m0 = build_domain_mesh(make_domain(1.5 * M_PI));
	TriangleMesh m1 = refine_uniform(m0);
	for (int i = 0; i < m1.n_vertices(); ++i) {
		auto [p0, p1] = m1.vertex_parents[i];
		if (i < m0.n_vertices()) {
			CHECK(p0 == i);
			CHECK(p1 == i);
		} else {
			Vec2 mid = midpoint(m1.vertices[p0], m1.vertices[p1]);
			CHECK(m1.vertices[i].x == mid.x);
			CHECK(m1.vertices[i].y == mid.y);
		}
	}
}

TEST_CASE("boundary loop starts at the origin and closes", "[mesh]") {
	for (double omega : {0.75 * M_PI, 1.5 * M_PI, 355.0 * M_PI / 180.0}) {
		TriangleMesh m = refine_uniform(build_domain_mesh(make_domain(omega)));
		auto nodes = boundary_nodes(m);
		REQUIRE(nodes.size() == m.boundary.size() + 1);
		CHECK(norm(nodes.front().pos) <= 1e-12);
		CHECK(nodes.front().vertex == nodes.back().vertex);
		CHECK(nodes.back().s == Approx(boundary_perimeter(m)));
		for (size_t k = 1; k < nodes.size(); ++k) CHECK(nodes[k].s > nodes[k - 1].s);
		// each vertex appears once
		std::vector<int> seen(m.n_vertices(), 0);
		for (const BoundaryEdge& e : m.boundary) seen[e.a] += 1;
		for (const BoundaryEdge& e : m.boundary) CHECK(seen[e.a] == 1);
		// segment ids are monotone along the loop
		for (size_t k = 1; k < m.boundary.size(); ++k) {
			CHECK(m.boundary[k].segment >= m.boundary[k - 1].segment);
		}
		CHECK(m.boundary.back().segment == (int)m.corners.size() - 1);
	}
}

TEST_CASE("shape regularity is preserved under refinement", "[mesh]") {
	for (double omega : {0.75 * M_PI, 1.5 * M_PI, 355.0 * M_PI / 180.0}) {
		TriangleMesh m = build_domain_mesh(make_domain(omega));
		double ratio_at_2 = 0, min_angle_at_2 = 0;
		int depth = omega < M_PI ? 8 : 5;
		for (int level = 0; level < depth; ++level) {
			if (level > 0) m = refine_uniform(m);
			double ratio = mesh_size(m) / min_edge(m);
			double ang = min_angle(m);
			if (level == 2) {
				ratio_at_2 = ratio;
				min_angle_at_2 = ang;
			}
			if (level > 2) {
				CHECK(ratio <= ratio_at_2 * 1.01);
				CHECK(ang >= min_angle_at_2 - 1e-12);
			}
		}
	}
}

TEST_CASE("mesh size halves approximately on the clipped domain", "[mesh]") {
	TriangleMesh m = build_domain_mesh(make_domain(355.0 * M_PI / 180.0));
	double h_prev = mesh_size(m);
	for (int level = 1; level < 4; ++level) {
		m = refine_uniform(m);
		double h = mesh_size(m);
		CHECK(h_prev / h == Approx(2.0).epsilon(0.02));
		h_prev = h;
	}
}
