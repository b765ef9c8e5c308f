#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <cfem/study.hpp>

namespace {

struct StudyOptions {
	std::string omega = "3pi/4";
	std::string regularizer = "l2proj";
	std::string out_dir;
	int levels = 8;
	double mu = -0.4999;
	bool vtk = false;
	bool berggren = false;
};

bool parse_bool(const std::string& v) {
	if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
	if (v == "0" || v == "false" || v == "no" || v == "off") return false;
	throw std::invalid_argument("cannot parse boolean '" + v + "'");
}

std::string strip(const std::string& s) {
	size_t a = s.find_first_not_of(" \t\r");
	if (a == std::string::npos) return "";
	size_t b = s.find_last_not_of(" \t\r");
	return s.substr(a, b - a + 1);
}

// flat key=value file; keys mirror the long options; command-line flags win
void apply_config(const std::string& path, const CLI::App& study, StudyOptions& opt) {
	std::ifstream in(path);
	if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
	auto given = [&](const char* name) { return study.count(name) > 0; };
	std::string line;
	int lineno = 0;
	while (std::getline(in, line)) {
		++lineno;
		std::string s = strip(line);
		if (s.empty() || s[0] == '#') continue;
		size_t eq = s.find('=');
		if (eq == std::string::npos) {
			throw std::runtime_error(path + ":" + std::to_string(lineno) +
			                         ": expected key=value, got '" + s + "'");
		}
		std::string key = strip(s.substr(0, eq));
		std::string val = strip(s.substr(eq + 1));
		if (key == "omega") {
			if (!given("--omega")) opt.omega = val;
		} else if (key == "regularizer") {
			if (!given("--regularizer")) opt.regularizer = val;
		} else if (key == "levels") {
			if (!given("--levels")) opt.levels = std::stoi(val);
		} else if (key == "out") {
			if (!given("--out")) opt.out_dir = val;
		} else if (key == "mu") {
			if (!given("--mu")) opt.mu = std::stod(val);
		} else if (key == "vtk") {
			if (!given("--vtk")) opt.vtk = parse_bool(val);
		} else if (key == "berggren-check") {
			if (!given("--berggren-check")) opt.berggren = parse_bool(val);
		} else {
			throw std::runtime_error(path + ":" + std::to_string(lineno) +
			                         ": unknown config key '" + key + "'");
		}
	}
}

// plain radians ("2.356") or multiples of pi ("3pi/4", "pi/2", "1.5pi", "3*pi/4")
double parse_angle(const std::string& text) {
	std::string s;
	for (char c : text) {
		if (c != ' ' && c != '*') s.push_back(c);
	}
	auto bad = [&]() { return std::invalid_argument("cannot parse angle '" + text + "'"); };
	size_t pos = s.find("pi");
	try {
		if (pos == std::string::npos) {
			size_t used = 0;
			double v = std::stod(s, &used);
			if (used != s.size()) throw bad();
			return v;
		}
		double a = 1.0;
		if (pos > 0) {
			size_t used = 0;
			a = std::stod(s.substr(0, pos), &used);
			if (used != pos) throw bad();
		}
		double b = 1.0;
		std::string rest = s.substr(pos + 2);
		if (!rest.empty()) {
			if (rest[0] != '/') throw bad();
			size_t used = 0;
			b = std::stod(rest.substr(1), &used);
			if (used != rest.size() - 1 || b == 0.0) throw bad();
		}
		return a * M_PI / b;
	} catch (const std::invalid_argument&) {
		throw bad();
	} catch (const std::out_of_range&) {
		throw bad();
	}
}

}  // namespace

int main(int argc, char** argv) {
	CLI::App app{"P1 Poisson solver with L2 boundary data on corner sectors"};
	app.require_subcommand(1);

	CLI::App* study = app.add_subcommand("study", "convergence study on the sector Omega_omega");
	StudyOptions opt;
	std::string config_path;
	study->add_option("--omega", opt.omega, "opening angle, radians or e.g. 3pi/4")
	    ->capture_default_str();
	study->add_option("--regularizer", opt.regularizer, "boundary regularization")
	    ->check(CLI::IsMember({"l2proj", "carstensen"}))
	    ->capture_default_str();
	study->add_option("--levels", opt.levels, "number of uniform refinement levels")
	    ->check(CLI::Range(2, 12))
	    ->capture_default_str();
	study->add_option("--out", opt.out_dir, "output directory for study.csv and study.md");
	study->add_option("--mu", opt.mu, "exponent of the reference solution r^mu sin(mu phi)")
	    ->capture_default_str();
	study->add_flag("--vtk", opt.vtk, "write the solution per level as legacy ASCII VTK");
	study->add_flag("--berggren-check", opt.berggren,
	                "compare against the transposition solve on coarse levels");
	study->add_option("--config", config_path, "flat key=value file with the options above");

	try {
		app.parse(argc, argv);
	} catch (const CLI::CallForHelp& e) {
		std::cout << app.help();
		return 0;
	} catch (const CLI::ParseError& e) {
		std::fprintf(stderr, "error: %s\n", e.what());
		return 1;
	}

	try {
		if (!config_path.empty()) apply_config(config_path, *study, opt);

		cfem::StudyConfig cfg;
		cfg.omega = parse_angle(opt.omega);
		cfg.regularizer = cfem::parse_regularizer(opt.regularizer);
		cfg.levels = opt.levels;
		cfg.mu = opt.mu;
		cfg.out_dir = opt.out_dir;
		cfg.write_vtk = opt.vtk;
		cfg.berggren_check = opt.berggren;

		cfem::ConvergenceTable table = cfem::run_study(cfg);
		std::fputs(cfem::table_markdown(table).c_str(), stdout);
		if (!table.berggren.empty()) std::fputs(cfem::berggren_report(table).c_str(), stdout);
		cfem::emit_outputs(table, cfg);
		return 0;
	} catch (const std::exception& e) {
		std::fprintf(stderr, "error: %s\n", e.what());
		return 1;
	}
}
