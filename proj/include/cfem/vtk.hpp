#pragma once

#include <cstdio>
#include <string>

#include "fem.hpp"
#include "mesh.hpp"

namespace cfem {

// legacy ASCII VTK unstructured grid; values are optional point data
inline void export_vtk(const std::string& path, const TriangleMesh& mesh,
                       const std::vector<double>* values = nullptr,
                       const std::string& name = "solution") {
	if (values && (int)values->size() != mesh.n_vertices()) {
		throw std::invalid_argument("vtk: point data size does not match the mesh");
	}
	std::FILE* f = std::fopen(path.c_str(), "w");
	if (!f) throw std::runtime_error("vtk: cannot open " + path);
	std::fprintf(f, "# vtk DataFile Version 3.0\n");
	std::fprintf(f, "cfem mesh level %d\n", mesh.level);
	std::fprintf(f, "ASCII\nDATASET UNSTRUCTURED_GRID\n");
	std::fprintf(f, "POINTS %d double\n", mesh.n_vertices());
	for (const Vec2& p : mesh.vertices) std::fprintf(f, "%.17g %.17g 0\n", p.x, p.y);
	std::fprintf(f, "CELLS %d %d\n", mesh.n_triangles(), 4 * mesh.n_triangles());
	for (const Triangle& t : mesh.triangles) std::fprintf(f, "3 %d %d %d\n", t.v[0], t.v[1], t.v[2]);
	std::fprintf(f, "CELL_TYPES %d\n", mesh.n_triangles());
	for (int k = 0; k < mesh.n_triangles(); ++k) std::fprintf(f, "5\n");
	if (values) {
		std::fprintf(f, "POINT_DATA %d\n", mesh.n_vertices());
		std::fprintf(f, "SCALARS %s double 1\nLOOKUP_TABLE default\n", name.c_str());
		for (double v : *values) std::fprintf(f, "%.17g\n", v);
	}
	std::fclose(f);
}

inline void export_vtk(const std::string& path, const NodalField& field,
                       const std::string& name = "solution") {
	export_vtk(path, *field.mesh, &field.values, name);
}

}  // namespace cfem
