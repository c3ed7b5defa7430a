#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mta/adversary.hpp"
#include "mta/circuits.hpp"

namespace {

using namespace mta;

Mta load_mta(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    return parse_mta(in, path);
}

NodeId load_dag(DagStore& store, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    return parse_dag(store, in, path);
}

Circuit load_circuit(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    return parse_circuit(in, path);
}

// Writes through `emit` to the given file, or to stdout when no path is set.
template <typename Fn>
void write_out(const std::string& path, Fn emit) {
    if (path.empty()) {
        emit(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write '" + path + "'");
    emit(out);
}

void print_stats(const QueryStats& stats, std::size_t dim) {
    std::cout << "EQ=" << stats.equivalence_queries << " MQ=" << stats.membership_queries
              << " S=" << stats.largest_counterexample << " DIM=" << dim << "\n";
}

std::string default_stem(const std::string& path) {
    std::string stem = path;
    std::size_t slash = stem.find_last_of('/');
    std::size_t dot = stem.find_last_of('.');
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
        stem.resize(dot);
    return stem;
}

int run(int argc, char** argv) {
    CLI::App app{"multiplicity tree automata toolkit"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    unsigned confidence = 40;
    std::string field_text = "q";

    std::string path_a, path_b, path_out, teacher_path, transcript_path, heavy_list;
    unsigned max_height = 0;
    bool want_stats = false;
    unsigned adv_n = 2;

    auto* cmd_eval = app.add_subcommand("eval", "evaluate an automaton on a DAG");
    cmd_eval->add_option("automaton", path_a)->required();
    cmd_eval->add_option("dag", path_b)->required();

    auto* cmd_product = app.add_subcommand("product", "pointwise-product automaton");
    cmd_product->add_option("left", path_a)->required();
    cmd_product->add_option("right", path_b)->required();
    cmd_product->add_option("out", path_out);

    auto* cmd_equiv = app.add_subcommand("equiv", "decide weight equivalence");
    cmd_equiv->add_option("left", path_a)->required();
    cmd_equiv->add_option("right", path_b)->required();
    cmd_equiv->add_option("counterexample", path_out);
    auto* opt_mh = cmd_equiv->add_option("--max-height", max_height,
                                         "cross-check by enumerating trees below this height");

    auto* cmd_equiv_rand = app.add_subcommand("equiv-rand", "randomized equivalence test");
    cmd_equiv_rand->add_option("left", path_a)->required();
    cmd_equiv_rand->add_option("right", path_b)->required();
    cmd_equiv_rand->add_option("--seed", seed);
    cmd_equiv_rand->add_option("--confidence", confidence);

    auto* cmd_learn = app.add_subcommand("learn", "learn an automaton from a teacher");
    cmd_learn->add_option("--teacher", teacher_path, "target automaton file")->required();
    cmd_learn->add_option("out", path_out);
    cmd_learn->add_flag("--stats", want_stats);
    cmd_learn->add_option("--transcript", transcript_path);

    auto* cmd_min = app.add_subcommand("minimize", "minimal equivalent automaton");
    cmd_min->add_option("automaton", path_a)->required();
    cmd_min->add_option("out", path_out);
    cmd_min->add_flag("--stats", want_stats);

    auto* cmd_toacit = app.add_subcommand("to-acit", "equivalence as a circuit zeroness instance");
    cmd_toacit->add_option("left", path_a)->required();
    cmd_toacit->add_option("right", path_b)->required();
    cmd_toacit->add_option("out", path_out);

    auto* cmd_fromacit = app.add_subcommand("from-acit", "circuit zeroness as automata");
    cmd_fromacit->add_option("circuit", path_a)->required();
    cmd_fromacit->add_option("stem", path_out);

    auto* cmd_acit = app.add_subcommand("acit-test", "randomized circuit zero test");
    cmd_acit->add_option("circuit", path_a)->required();
    cmd_acit->add_option("--seed", seed);
    cmd_acit->add_option("--confidence", confidence);

    auto* cmd_bench = app.add_subcommand("bench-adversary", "learner stress run vs the hard family");
    cmd_bench->add_option("--n", adv_n, "half the target dimension");
    cmd_bench->add_option("--heavy", heavy_list, "comma list of <name>:<rank> heavy symbols")
        ->required();
    cmd_bench->add_option("--seed", seed);
    cmd_bench->add_option("--field", field_text, "q or fp:<prime>");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }

    if (*cmd_eval) {
        Mta a = load_mta(path_a);
        DagStore store(a.alphabet());
        NodeId g = load_dag(store, path_b);
        std::cout << eval(a, store, g).to_string() << "\n";
    } else if (*cmd_product) {
        Mta p = product(load_mta(path_a), load_mta(path_b));
        write_out(path_out, [&](std::ostream& out) { print_mta(p, out); });
    } else if (*cmd_equiv) {
        Mta a = load_mta(path_a);
        Mta b = load_mta(path_b);
        DagStore store(a.alphabet());
        EquivResult res = check_equiv(a, b, store);
        if (opt_mh->count() && brute_force_equiv(a, b, store, max_height) != res.equivalent)
            throw std::runtime_error("enumeration cross-check disagrees below height " +
                                     std::to_string(max_height));
        if (res.equivalent) {
            std::cout << "equivalent\n";
        } else {
            std::cout << "not equivalent\n";
            write_out(path_out,
                      [&](std::ostream& out) { print_dag(store, *res.counterexample, out); });
        }
    } else if (*cmd_equiv_rand) {
        Circuit c = equiv_to_acit(load_mta(path_a), load_mta(path_b));
        Rng rng(seed);
        AcitTestResult res = acit_random_test(c, confidence, rng);
        if (res.certainly_nonzero)
            std::cout << "not equivalent (prime=" << res.certificate->prime
                      << " residue=" << res.certificate->residue << " trials=" << res.trials
                      << ")\n";
        else
            std::cout << "probably equivalent (trials=" << res.trials << " error<=2^-"
                      << confidence << ")\n";
    } else if (*cmd_learn || *cmd_min) {
        Mta target = load_mta(*cmd_learn ? teacher_path : path_a);
        DagStore store(target.alphabet());
        SimulatedTeacher teacher(target);
        std::ofstream transcript;
        if (!transcript_path.empty()) {
            transcript.open(transcript_path);
            if (!transcript) throw std::invalid_argument("cannot write '" + transcript_path + "'");
        }
        auto [learned, stats] = lmta(teacher, store, transcript.is_open() ? &transcript : nullptr);
        write_out(path_out, [&](std::ostream& out) { print_mta(learned, out); });
        if (want_stats) print_stats(stats, learned.dim());
    } else if (*cmd_toacit) {
        Circuit c = equiv_to_acit(load_mta(path_a), load_mta(path_b));
        write_out(path_out, [&](std::ostream& out) { print_circuit(c, out); });
    } else if (*cmd_fromacit) {
        Circuit c = load_circuit(path_a);
        if (c.has_vars())
            throw std::invalid_argument("variable gates cannot be turned into automata");
        std::string stem = path_out.empty() ? default_stem(path_a) : path_out;
        auto emit = [&](const Circuit& part, const std::string& path) {
            Mta a = acit_to_mta(normalize_circuit(part));
            write_out(path, [&](std::ostream& out) { print_mta(a, out); });
            std::cout << "wrote " << path << "\n";
        };
        if (c.has_sub()) {
            auto [pos, neg] = split_subtraction(c);
            emit(pos, stem + ".pos.mta");
            emit(neg, stem + ".neg.mta");
        } else {
            emit(c, stem + ".mta");
        }
    } else if (*cmd_acit) {
        Circuit c = load_circuit(path_a);
        Rng rng(seed);
        AcitTestResult res = acit_random_test(c, confidence, rng);
        if (res.certainly_nonzero) {
            std::cout << "nonzero prime=" << res.certificate->prime
                      << " residue=" << res.certificate->residue << " trials=" << res.trials;
            if (!res.certificate->assignment.empty()) {
                std::cout << " assignment=";
                for (std::size_t i = 0; i < res.certificate->assignment.size(); ++i)
                    std::cout << (i ? "," : "") << res.certificate->assignment[i];
            }
            std::cout << "\n";
        } else {
            std::cout << "zero-likely trials=" << res.trials << " error<=2^-" << confidence
                      << "\n";
        }
    } else if (*cmd_bench) {
        std::vector<std::pair<std::string, unsigned>> symbols{{"s0", 0}, {"s1", 1}};
        std::stringstream list(heavy_list);
        std::string item;
        while (std::getline(list, item, ',')) {
            std::size_t colon = item.find(':');
            if (colon == std::string::npos || colon == 0 || colon + 1 >= item.size())
                throw std::invalid_argument("--heavy items must look like <name>:<rank>");
            unsigned rank = 0;
            try {
                rank = static_cast<unsigned>(std::stoul(item.substr(colon + 1)));
            } catch (const std::exception&) {
                throw std::invalid_argument("bad rank in --heavy item '" + item + "'");
            }
            symbols.emplace_back(item.substr(0, colon), rank);
        }
        HardFamilySpec spec(Field::parse(field_text), adv_n, RankedAlphabet(symbols), "s0", "s1");
        AdversarialTeacher teacher(spec, seed);
        DagStore store(spec.alphabet);
        auto [learned, stats] = lmta(teacher, store);
        bool correct = check_equiv(teacher.committed_automaton(), learned, store).equivalent;
        print_stats(stats, learned.dim());
        std::cout << "total-queries=" << stats.equivalence_queries + stats.membership_queries
                  << " lower-bound=" << query_lower_bound(spec)
                  << " entries=" << teacher.total_entries()
                  << " revealed=" << teacher.revealed_count()
                  << " correct=" << (correct ? "yes" : "no") << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const mta::TeacherInconsistencyError& e) {
        std::cerr << "teacher inconsistency: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
