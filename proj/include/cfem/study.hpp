#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "error.hpp"
#include "fem.hpp"
#include "vtk.hpp"

namespace cfem {

enum class Regularizer { l2_projection, carstensen };

inline const char* regularizer_name(Regularizer r) {
	return r == Regularizer::l2_projection ? "l2proj" : "carstensen";
}

inline Regularizer parse_regularizer(const std::string& s) {
	if (s == "l2proj") return Regularizer::l2_projection;
	if (s == "carstensen") return Regularizer::carstensen;
	throw std::invalid_argument("unknown regularizer '" + s + "', expected l2proj or carstensen");
}

// L2(Omega) rate for the corner solution: 1/2 on convex sectors, lambda - 1/2 past pi
inline double expected_rate(double omega) {
	return std::min(0.5, M_PI / omega - 0.5);
}

struct StudyConfig {
	double omega = 0.75 * M_PI;
	Regularizer regularizer = Regularizer::l2_projection;
	int levels = 8;
	double mu = -0.4999;
	std::string out_dir;
	bool write_vtk = false;
	bool berggren_check = false;
	int berggren_budget = 2000;
	double solver_tol = 1e-12;
	double quad_rel_tol = 1e-6;
	std::function<double(Vec2)> exact_override;  // test hook: datum and reference together
};

struct BerggrenCheckRecord {
	int level = 0;
	double h = 0;
	long long unknowns = 0;
	double max_dev = 0;
};

struct ConvergenceTable {
	double omega = 0;
	Regularizer regularizer = Regularizer::l2_projection;
	double expected = 0;
	std::vector<ConvergenceRecord> rows;
	std::vector<BerggrenCheckRecord> berggren;
};

inline void validate(const StudyConfig& cfg) {
	make_domain(cfg.omega);
	if (cfg.levels < 2) throw std::invalid_argument("a study needs at least two levels");
	if (cfg.levels > 12) throw std::invalid_argument("level count is unreasonably large");
}

namespace detail {

inline NodalField prolong(const NodalField& coarse, const TriangleMesh& fine) {
	NodalField out{&fine, std::vector<double>(fine.n_vertices())};
	for (int i = 0; i < fine.n_vertices(); ++i) {
		if (i < (int)coarse.values.size()) {
			out.values[i] = coarse.values[i];
		} else {
			auto [p0, p1] = fine.vertex_parents[i];
			out.values[i] = 0.5 * (out.values[p0] + out.values[p1]);
		}
	}
	return out;
}

}  // namespace detail

inline ConvergenceTable run_study(const StudyConfig& cfg) {
	validate(cfg);
	DomainSpec dom = make_domain(cfg.omega);

	ExactSolutionSpec exact =
	    cfg.exact_override ? exact_from_function(cfg.exact_override) : corner_singular_solution(cfg.mu);
	BoundaryFunctionSpec datum = boundary_datum_xy(
	    [&exact](Vec2 p) { return eval_exact(exact, p); }, exact.singular_at_origin);

	ConvergenceTable table;
	table.omega = cfg.omega;
	table.regularizer = cfg.regularizer;
	table.expected = expected_rate(cfg.omega);

	if (!cfg.out_dir.empty()) std::filesystem::create_directories(cfg.out_dir);

	TriangleMesh mesh = build_domain_mesh(dom);
	NodalField prev;
	for (int level = 0; level < cfg.levels; ++level) {
		if (level > 0) mesh = refine_uniform(mesh);

		BoundaryField uh = cfg.regularizer == Regularizer::l2_projection
		                       ? l2_project_boundary(mesh, datum, cfg.solver_tol)
		                       : carstensen_interpolate(mesh, datum);
		NodalField guess;
		if (level > 0) guess = detail::prolong(prev, mesh);
		NodalField y = solve_regularized(mesh, uh, zero_source(), level > 0 ? &guess : nullptr,
		                                 cfg.solver_tol);

		ConvergenceRecord rec;
		rec.h = mesh_size(mesh);
		rec.unknowns = mesh.n_vertices();
		rec.error = l2_domain_error(y, exact, cfg.quad_rel_tol);
		table.rows.push_back(rec);

		if (cfg.berggren_check && mesh.n_vertices() <= cfg.berggren_budget) {
			NodalField yb = solve_berggren(mesh, datum, zero_source(), cfg.berggren_budget,
			                               cfg.solver_tol);
			NodalField yref = y;
			if (cfg.regularizer != Regularizer::l2_projection) {
				BoundaryField up = l2_project_boundary(mesh, datum, cfg.solver_tol);
				yref = solve_regularized(mesh, up, zero_source(), nullptr, cfg.solver_tol);
			}
			double dev = 0;
			for (int i = 0; i < mesh.n_vertices(); ++i) {
				dev = std::max(dev, std::abs(yb.values[i] - yref.values[i]));
			}
			table.berggren.push_back(
			    BerggrenCheckRecord{level, rec.h, rec.unknowns, dev});
		}
		if (cfg.write_vtk && !cfg.out_dir.empty()) {
			export_vtk(cfg.out_dir + "/solution_level" + std::to_string(level) + ".vtk", y);
		}
		prev = std::move(y);
	}

	std::vector<double> errs, hs;
	for (const ConvergenceRecord& r : table.rows) {
		errs.push_back(r.error);
		hs.push_back(r.h);
	}
	std::vector<double> eoc = compute_eoc(errs, hs);
	for (size_t k = 0; k < eoc.size(); ++k) table.rows[k].eoc = eoc[k];
	return table;
}

namespace detail {

// the tables truncate h to five decimals
inline std::string format_h(double h) {
	char buf[32];
	std::snprintf(buf, sizeof(buf), "%.5f", std::floor(h * 1e5) / 1e5);
	return buf;
}

inline std::string format_error(double e) {
	char buf[32];
	std::snprintf(buf, sizeof(buf), "%.5g", e);
	return buf;
}

inline std::string format_eoc(double e) {
	char buf[32];
	std::snprintf(buf, sizeof(buf), "%.5f", e);
	return buf;
}

}  // namespace detail

inline std::string table_csv(const ConvergenceTable& table) {
	std::ostringstream out;
	out << "h,unknowns,error,eoc\n";
	for (size_t k = 0; k < table.rows.size(); ++k) {
		const ConvergenceRecord& r = table.rows[k];
		out << detail::format_h(r.h) << ',' << r.unknowns << ',' << detail::format_error(r.error)
		    << ',' << (k == 0 ? "" : detail::format_eoc(r.eoc)) << '\n';
	}
	return out.str();
}

inline std::string table_markdown(const ConvergenceTable& table) {
	std::ostringstream out;
	out << "| h | unknowns | error | eoc |\n";
	out << "| --- | --- | --- | --- |\n";
	for (size_t k = 0; k < table.rows.size(); ++k) {
		const ConvergenceRecord& r = table.rows[k];
		out << "| " << detail::format_h(r.h) << " | " << r.unknowns << " | "
		    << detail::format_error(r.error) << " | " << (k == 0 ? "" : detail::format_eoc(r.eoc))
		    << " |\n";
	}
	out << "| expected | | | " << detail::format_eoc(table.expected) << " |\n";
	return out.str();
}

inline std::string berggren_report(const ConvergenceTable& table) {
	std::ostringstream out;
	for (const BerggrenCheckRecord& r : table.berggren) {
		out << "transposition check: level=" << r.level << " h=" << detail::format_h(r.h)
		    << " unknowns=" << r.unknowns << " max_nodewise_dev=" << detail::format_error(r.max_dev)
		    << "\n";
	}
	return out.str();
}

inline void emit_outputs(const ConvergenceTable& table, const StudyConfig& cfg) {
	if (cfg.out_dir.empty()) return;
	std::filesystem::create_directories(cfg.out_dir);
	{
		std::ofstream f(cfg.out_dir + "/study.csv", std::ios::binary);
		f << table_csv(table);
	}
	{
		std::ofstream f(cfg.out_dir + "/study.md", std::ios::binary);
		f << table_markdown(table);
		if (!table.berggren.empty()) f << "\n" << berggren_report(table);
	}
}

}  // namespace cfem
