#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "tweetml/tweetml.hpp"

namespace {

// Command-line overrides for ExperimentConfig. Only options actually given
// on the command line are applied on top of the config file.
struct Overrides {
    std::string config_path;
    std::string dataset, dataset_id, output_dir, strategy, scope, sweep_preset;
    std::uint64_t seed = 0;
    std::size_t train_size = 0, min_words = 0, k = 0, m = 0, post_k = 0, knn_k = 0, epochs = 0;
    double epsilon = 0.0, lambda = 0.0;
    std::vector<std::string> presets, methods;
    std::vector<std::size_t> k_values;
    bool no_baselines = false, plot = false, prune_jointly = false, no_coverage = false;

    std::vector<CLI::Option*> given;
    CLI::App* app = nullptr;

    void attach(CLI::App* sub) {
        app = sub;
        sub->add_option("-c,--config", config_path, "experiment config file (JSON)");
        opt(sub->add_option("--dataset", dataset, "dataset file (JSON lines)"));
        opt(sub->add_option("--dataset-id", dataset_id, "name used in reports"));
        opt(sub->add_option("-o,--output", output_dir, "output directory"));
        opt(sub->add_option("--seed", seed, "master seed"));
        opt(sub->add_option("--train-size", train_size, "training split size"));
        opt(sub->add_option("--min-words", min_words, "drop tweets with fewer words (0 = off)"));
        opt(sub->add_flag("--prune-jointly", prune_jointly, "count n-grams over train+test"));
        opt(sub->add_option("--preset", presets, "feature preset f1..f5 (repeatable)"));
        opt(sub->add_option("--method", methods,
                            "knn|svm|rakel|rakel+sum|rakel+wsum (repeatable)"));
        opt(sub->add_flag("--no-baselines", no_baselines, "skip KNN and SVM baselines"));
        opt(sub->add_option("-k,--labelset-size", k, "RAkEL labelset size k"));
        opt(sub->add_option("-m,--models", m, "RAkEL model count m"));
        opt(sub->add_option("--epsilon", epsilon, "vote threshold"));
        opt(sub->add_flag("--no-coverage-check", no_coverage, "allow labels no labelset covers"));
        opt(sub->add_option("--strategy", strategy, "post-processing: none|sum|wsum|both"));
        opt(sub->add_option("-K,--neighbors", post_k, "post-processing neighbor count"));
        opt(sub->add_option("--scope", scope, "violated_groups_only|full_relabel"));
        opt(sub->add_option("--knn-k", knn_k, "KNN baseline neighbor count"));
        opt(sub->add_option("--svm-lambda", lambda, "SVM regularization"));
        opt(sub->add_option("--svm-epochs", epochs, "SVM epochs"));
        opt(sub->add_option("--sweep-preset", sweep_preset, "preset used by sweep"));
        opt(sub->add_option("--k-values", k_values, "K values for sweep"));
        opt(sub->add_flag("--plot", plot, "write a gnuplot script next to the sweep"));
    }

    void opt(CLI::Option* o) { given.push_back(o); }

    bool has(const std::string& name) const {
        for (auto* o : given)
            if (o->check_lname(name) && o->count() > 0)
                return true;
        return false;
    }

    tweetml::ExperimentConfig resolve() const {
        using namespace tweetml;
        ExperimentConfig c = config_path.empty() ? ExperimentConfig{}
                                                 : ExperimentConfig::load(config_path);
        if (has("dataset")) c.dataset = dataset;
        if (has("dataset-id")) c.dataset_id = dataset_id;
        if (has("output")) c.output_dir = output_dir;
        if (has("seed")) c.seed = seed;
        if (has("train-size")) c.train_size = train_size;
        if (has("min-words")) c.min_words = min_words;
        if (has("prune-jointly")) c.prune_jointly = true;
        if (has("preset")) c.presets = presets;
        if (has("method")) {
            std::vector<Method> ms;
            for (const auto& s : methods)
                ms.push_back(method_from_string(s));
            c.methods = ms;
        }
        if (has("no-baselines")) c.baselines = false;
        if (has("labelset-size")) c.ensemble.k = k;
        if (has("models")) c.ensemble.m = m;
        if (has("epsilon")) c.ensemble.epsilon = epsilon;
        if (has("no-coverage-check")) c.ensemble.coverage_check = false;
        if (has("strategy")) c.strategy = strategy;
        if (has("neighbors")) c.post_k = post_k;
        if (has("scope")) c.scope = repair_scope_from_string(scope);
        if (has("knn-k")) c.knn_k = knn_k;
        if (has("svm-lambda")) c.svm.lambda = lambda;
        if (has("svm-epochs")) c.svm.epochs = epochs;
        if (has("sweep-preset")) c.sweep_preset = sweep_preset;
        if (has("k-values")) c.sweep_k_values = k_values;
        if (has("plot")) c.sweep_plot = true;
        return c;
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tweet purpose + position classification: RAkEL with KNN post-processing"};
    app.require_subcommand(1);

    Overrides featurize_o, train_o, evaluate_o, sweep_o;
    featurize_o.attach(app.add_subcommand("featurize", "split the dataset and build feature caches"));
    train_o.attach(app.add_subcommand("train", "train ensembles and baselines from the feature cache"));
    evaluate_o.attach(app.add_subcommand("evaluate", "score methods x presets and write the report"));
    sweep_o.attach(app.add_subcommand("sweep", "post-processing neighbor-count sensitivity sweep"));
    auto* fixtures = app.add_subcommand("fixtures", "run the worked voting and repair examples");

    auto* synth = app.add_subcommand("synth", "write a synthetic labeled corpus");
    tweetml::synthetic::Options synth_opts;
    std::string synth_out;
    synth->add_option("--count", synth_opts.count, "number of tweets")->capture_default_str();
    synth->add_option("--seed", synth_opts.seed, "generator seed")->capture_default_str();
    synth->add_option("--out", synth_out, "output file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (featurize_o.app->parsed())
            tweetml::cmd_featurize(featurize_o.resolve(), std::cout);
        else if (train_o.app->parsed())
            tweetml::cmd_train(train_o.resolve(), std::cout);
        else if (evaluate_o.app->parsed())
            tweetml::cmd_evaluate(evaluate_o.resolve(), std::cout);
        else if (sweep_o.app->parsed())
            tweetml::cmd_sweep(sweep_o.resolve(), std::cout);
        else if (fixtures->parsed())
            return tweetml::cmd_fixtures(std::cout) ? 0 : 2;
        else if (synth->parsed()) {
            const auto data = tweetml::synthetic::generate(synth_opts);
            tweetml::save_dataset(synth_out, data);
            std::cout << "wrote " << data.size() << " tweets to " << synth_out << "\n";
        }
    } catch (const tweetml::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
