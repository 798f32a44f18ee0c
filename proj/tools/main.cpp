#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dfib/lattice.hpp"
#include "dfib/protocols.hpp"
#include "json.hpp"
#include "selftest.hpp"

using namespace dfib;

namespace {

enum Exit { kOk = 0, kVerify = 1, kUsage = 2 };

std::uint64_t default_seed() {
    if (const char* s = std::getenv("DFIB_SEED")) {
        try {
            return std::stoull(s);
        } catch (...) {
            std::cerr << "ignoring malformed DFIB_SEED\n";
        }
    }
    return 42;
}

std::string valid_names() {
    std::string s;
    for (const auto& n : experiment_names()) s += "  " + n + "\n";
    s += "  lattices for ground-state:";
    for (auto k : ground_state_lattices()) s += " " + to_string(k);
    return s + "\n";
}

int emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return kOk;
    }
    std::ofstream f(path);
    if (!f) {
        std::cerr << "cannot write " << path << "\n";
        return kUsage;
    }
    f << text << (text.empty() || text.back() == '\n' ? "" : "\n");
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Doubled-Fibonacci string-net circuit simulator"};
    app.require_subcommand(1);

    std::string experiment, lattice, format = "text", output, circuit_file;
    std::uint64_t shots = 0, seed = default_seed();
    double tolerance = 1e-9;

    auto add_format = [&](CLI::App* c) {
        c->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
        c->add_option("--output,-o", output, "write to a file instead of stdout");
    };

    auto* list = app.add_subcommand("list", "list experiment names");
    add_format(list);

    auto* run = app.add_subcommand("run", "run an experiment and verify it");
    run->add_option("--experiment,-e", experiment, "experiment name");
    run->add_option("--circuit", circuit_file, "replay a dumped circuit JSON file");
    run->add_option("--shots", shots, "samples per readout (0 = exact only)");
    run->add_option("--seed", seed, "sampling seed (default 42 or $DFIB_SEED)");
    run->add_option("--tolerance", tolerance, "verification tolerance");
    add_format(run);

    auto* dump = app.add_subcommand("dump-circuit", "print the executed circuit as JSON");
    dump->add_option("--experiment,-e", experiment, "experiment name")->required();
    dump->add_option("--shots", shots, "recorded in the dump");
    dump->add_option("--seed", seed, "recorded in the dump");
    dump->add_option("--tolerance", tolerance, "recorded in the dump");
    dump->add_option("--output,-o", output, "write to a file instead of stdout");

    auto* dl = app.add_subcommand("dump-lattice", "print a lattice description as JSON");
    dl->add_option("--lattice,-l", lattice, "lattice name")->required();
    dl->add_option("--output,-o", output, "write to a file instead of stdout");

    auto* self = app.add_subcommand("selftest", "run the consistency checks and every experiment");
    self->add_option("--tolerance", tolerance, "verification tolerance");
    add_format(self);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*list) {
            if (format == "json") return emit(nlohmann::json(experiment_names()).dump(2), output);
            std::string s;
            for (const auto& n : experiment_names()) s += n + "\n";
            return emit(s, output);
        }

        if (*dl) return emit(lattice_to_json(build_lattice(parse_lattice_kind(lattice))), output);

        if (*run || *dump) {
            if (tolerance <= 0) {
                std::cerr << "tolerance must be positive\n";
                return kUsage;
            }
            ExperimentCircuit ec;
            if (!circuit_file.empty()) {
                if (!experiment.empty()) {
                    std::cerr << "give either --experiment or --circuit\n";
                    return kUsage;
                }
                std::ifstream f(circuit_file);
                if (!f) {
                    std::cerr << "cannot read " << circuit_file << "\n";
                    return kUsage;
                }
                std::stringstream ss;
                ss << f.rdbuf();
                ec = circuit_from_json(ss.str());
                if (run->count("--shots")) ec.experiment.shots = shots;
                if (run->count("--seed")) ec.experiment.seed = seed;
                if (run->count("--tolerance")) ec.experiment.tolerance = tolerance;
            } else {
                if (experiment.empty()) {
                    std::cerr << "run needs --experiment or --circuit; valid experiments:\n" << valid_names();
                    return kUsage;
                }
                Experiment e;
                try {
                    e = parse_experiment(experiment);
                } catch (const std::invalid_argument& ex) {
                    std::cerr << ex.what() << "\nvalid experiments:\n" << valid_names();
                    return kUsage;
                }
                e.shots = shots;
                e.seed = seed;
                e.tolerance = tolerance;
                ec = build_experiment(e);
            }
            if (*dump) return emit(circuit_to_json(ec), output);
            ExperimentReport r = run_experiment(ec);
            int rc = emit(format == "json" ? report_to_json(r) : report_to_text(r), output);
            if (rc != kOk) return rc;
            return r.passed ? kOk : kVerify;
        }

        if (*self) {
            auto lines = run_selftest(tolerance);
            bool ok = tolerance >= kToleranceFloor;
            nlohmann::json j = nlohmann::json::array();
            std::string text;
            for (const auto& l : lines) {
                ok = ok && l.passed;
                j.push_back({{"check", l.name}, {"value", l.value}, {"passed", l.passed}});
                text += (l.passed ? "PASS " : "FAIL ") + l.name + "\n";
            }
            text += ok ? "selftest PASS\n" : "selftest FAIL\n";
            int rc = emit(format == "json" ? nlohmann::json{{"checks", j}, {"passed", ok}}.dump(2) : text, output);
            if (rc != kOk) return rc;
            return ok ? kOk : kVerify;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kVerify;
    }
    return kUsage;
}
