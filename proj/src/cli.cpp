#include "langgeo/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "langgeo/formats.hpp"
#include "langgeo/importance.hpp"
#include "langgeo/parallel.hpp"
#include "langgeo/pipeline.hpp"
#include "langgeo/synth.hpp"

namespace langgeo {

namespace fs = std::filesystem;

namespace {

// Subcommands read defaults from a pipeline-style JSON file; explicit flags
// take precedence over anything found there.
struct ConfigFile {
    std::string path;
    nlohmann::json json = nlohmann::json::object();
    fs::path base_dir;

    void load()
    {
        if (path.empty()) {
            return;
        }
        const std::string text = read_text_file(path);
        try {
            json = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(path + ": " + e.what());
        }
        if (!json.is_object()) {
            throw ValidationError(path + ": config must be a JSON object");
        }
        base_dir = fs::path(path).parent_path();
    }

    const nlohmann::json* find(std::initializer_list<const char*> keys) const
    {
        const nlohmann::json* node = &json;
        for (const char* key : keys) {
            if (!node->is_object() || !node->contains(key)) {
                return nullptr;
            }
            node = &node->at(key);
        }
        return node;
    }

    template <typename T>
    void fill(CLI::Option* flag, T& value, std::initializer_list<const char*> keys) const
    {
        if (flag->count() > 0) {
            return;
        }
        if (const auto* node = find(keys)) {
            try {
                value = node->get<T>();
            } catch (const nlohmann::json::exception& e) {
                throw ValidationError(path + ": " + e.what());
            }
        }
    }

    fs::path resolve(const std::string& p) const
    {
        const fs::path candidate(p);
        return candidate.is_absolute() || base_dir.empty() ? candidate : base_dir / candidate;
    }
};

MissingPairPolicy parse_missing(const std::string& name)
{
    if (name == "fail") {
        return MissingPairPolicy::fail;
    }
    if (name == "drop") {
        return MissingPairPolicy::drop;
    }
    if (name == "impute") {
        return MissingPairPolicy::impute;
    }
    throw ValidationError("unknown missing-pair policy '" + name + "'");
}

LayoutTargets parse_targets(const std::string& name)
{
    if (name == "tree-path") {
        return LayoutTargets::tree_path;
    }
    if (name == "metric") {
        return LayoutTargets::metric;
    }
    throw ValidationError("unknown layout targets '" + name + "'");
}

void emit_text(const std::string& output, const std::string& text, std::ostream& out)
{
    if (output.empty() || output == "-") {
        out << text;
    } else {
        write_text_file(output, text);
    }
}

std::vector<fs::path> lgv_files_in(const fs::path& dir)
{
    if (!fs::is_directory(dir)) {
        throw ValidationError("'" + dir.string() + "' is not a directory");
    }
    std::vector<fs::path> found;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".lgv") {
            found.push_back(entry.path());
        }
    }
    std::sort(found.begin(), found.end());
    return found;
}

nlohmann::json tree_to_json(const SpanningTree& tree)
{
    nlohmann::json doc;
    doc["nodes"] = tree.nodes;
    doc["edges"] = nlohmann::json::array();
    for (const auto& e : tree.edges) {
        doc["edges"].push_back({{"source", tree.nodes[static_cast<std::size_t>(e.source)]},
                                {"target", tree.nodes[static_cast<std::size_t>(e.target)]},
                                {"weight", e.weight}});
    }
    doc["total_weight"] = tree.total_weight;
    return doc;
}

SpanningTree tree_from_json(const nlohmann::json& doc)
{
    SpanningTree tree;
    try {
        tree.nodes = doc.at("nodes").get<std::vector<std::string>>();
        std::map<std::string, int> index;
        for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
            if (!index.emplace(tree.nodes[i], static_cast<int>(i)).second) {
                throw ValidationError("tree node '" + tree.nodes[i] + "' appears twice");
            }
        }
        auto lookup = [&](const std::string& name) {
            const auto it = index.find(name);
            if (it == index.end()) {
                throw ValidationError("tree edge names unknown node '" + name + "'");
            }
            return it->second;
        };
        for (const auto& e : doc.at("edges")) {
            int s = lookup(e.at("source").get<std::string>());
            int t = lookup(e.at("target").get<std::string>());
            if (s > t) {
                std::swap(s, t);
            }
            tree.edges.push_back({s, t, e.at("weight").get<double>()});
        }
        tree.total_weight = doc.at("total_weight").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed tree document: ") + e.what());
    }
    validate(tree);
    return tree;
}

nlohmann::json read_json(const std::string& path)
{
    try {
        return nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

LabeledPartition read_partition(const std::string& path) { return parse_partition_csv(read_text_file(path)); }

Embedding read_embedding(const std::string& path, const std::string& sidecar)
{
    Embedding embedding = parse_embedding_csv(read_text_file(path));
    if (!sidecar.empty()) {
        apply_sidecar(read_json(sidecar), embedding);
    }
    return embedding;
}

std::string sidecar_path_for(const std::string& output)
{
    fs::path p(output);
    p.replace_extension(".json");
    return p.string();
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Language geometry toolkit: importance vectors, Hamming geometry, embedding and evaluation",
                 "langgeo"};
    app.set_version_flag("--version", std::string(toolkit_version));
    app.require_subcommand(1);

    int threads = 0;
    auto* threads_flag = app.add_option("--threads", threads, "Worker thread cap (overrides LANGGEO_THREADS)")
                             ->check(CLI::PositiveNumber);

    ConfigFile config;
    auto add_config = [&](CLI::App* sub) {
        sub->add_option("--config", config.path, "JSON config using the pipeline schema")->check(CLI::ExistingFile);
    };

    // score
    auto* score = app.add_subcommand("score", "Importance scores W^2 / diag(H^-1) from a layer dump (.lgt)");
    std::string score_input, score_output;
    double damping = 0.01;
    std::optional<double> damping_absolute;
    score->add_option("--input", score_input, "Tensors named 'weight' and 'calibration' per layer")->required();
    score->add_option("--output", score_output, "Tensor file of 'importance' matrices")->required();
    score->add_option("--damping", damping, "Relative damping rho: lambda = rho * mean(diag(X^T X))");
    score->add_option("--damping-absolute", damping_absolute, "Absolute damping lambda");
    add_config(score);

    // binarize
    auto* binarize = app.add_subcommand("binarize", "Median-threshold importance scores into a language vector");
    std::string bin_input, bin_output;
    VectorTags bin_tags;
    binarize->add_option("--input", bin_input, "Tensor file of 'importance' matrices")->required();
    binarize->add_option("--output", bin_output, ".lgv output")->required();
    binarize->add_option("--language", bin_tags.language)->required();
    binarize->add_option("--model", bin_tags.model)->required();
    binarize->add_option("--corpus", bin_tags.corpus)->required();
    add_config(binarize);

    // distmat
    auto* distmat = app.add_subcommand("distmat", "Pairwise Hamming distances for one (model, corpus) run");
    std::vector<std::string> dm_inputs;
    std::string dm_dir, dm_output, dm_csv;
    int dm_run = -1;
    distmat->add_option("--inputs", dm_inputs, ".lgv files");
    distmat->add_option("--input-dir", dm_dir, "Directory of .lgv files, read in name order");
    distmat->add_option("--run", dm_run, "Index of a run in the config file to use as input");
    distmat->add_option("--output", dm_output, ".lgd output")->required();
    distmat->add_option("--csv", dm_csv, "Optional CSV export");
    add_config(distmat);

    // aggregate
    auto* aggregate_cmd = app.add_subcommand("aggregate", "Observed-entry mean over run distance matrices");
    std::vector<std::string> ag_inputs;
    std::string ag_output, ag_csv, ag_universe;
    aggregate_cmd->add_option("--inputs", ag_inputs, ".lgd files")->required();
    aggregate_cmd->add_option("--universe", ag_universe, "Text file, one language per line (default: union)");
    aggregate_cmd->add_option("--output", ag_output, ".lgd output")->required();
    aggregate_cmd->add_option("--csv", ag_csv, "Optional CSV export");
    add_config(aggregate_cmd);

    // embed
    auto* embed = app.add_subcommand("embed", "Classical scaling of a distance matrix");
    std::string em_input, em_output, em_sidecar, em_missing = "fail";
    double epsilon = default_mds_epsilon;
    double impute_value = 0.0;
    embed->add_option("--input", em_input, ".lgd input")->required();
    embed->add_option("--output", em_output, "Embedding CSV")->required();
    embed->add_option("--sidecar", em_sidecar, "Spectrum JSON (default: output with .json extension)");
    auto* epsilon_flag = embed->add_option("--epsilon", epsilon, "Eigenvalue threshold");
    auto* missing_flag = embed->add_option("--missing", em_missing, "fail | drop | impute")
                             ->check(CLI::IsMember({"fail", "drop", "impute"}));
    auto* impute_flag = embed->add_option("--impute-value", impute_value, "Constant for --missing impute");
    add_config(embed);

    // cluster
    auto* cluster = app.add_subcommand("cluster", "k-means++ / Lloyd on an embedding");
    std::string cl_input, cl_output;
    int cl_k = 0;
    std::uint64_t seed = 0;
    int restarts = 10;
    cluster->add_option("--input", cl_input, "Embedding CSV")->required();
    cluster->add_option("--k", cl_k, "Number of clusters")->required()->check(CLI::PositiveNumber);
    auto* cl_seed_flag = cluster->add_option("--seed", seed);
    auto* cl_restarts_flag = cluster->add_option("--restarts", restarts)->check(CLI::PositiveNumber);
    cluster->add_option("--output", cl_output, "Partition CSV (default: stdout)");
    add_config(cluster);

    // evaluate
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Silhouette, ARI and purity against a reference partition");
    std::string ev_embedding, ev_sidecar, ev_reference, ev_name, ev_output, ev_clusters, ev_confusion, ev_distances;
    evaluate_cmd->add_option("--embedding", ev_embedding, "Embedding CSV")->required();
    evaluate_cmd->add_option("--reference", ev_reference, "Reference partition CSV")->required();
    evaluate_cmd->add_option("--name", ev_name, "Reference name (default: file stem)");
    auto* ev_seed_flag = evaluate_cmd->add_option("--seed", seed);
    auto* ev_restarts_flag = evaluate_cmd->add_option("--restarts", restarts)->check(CLI::PositiveNumber);
    evaluate_cmd->add_option("--output", ev_output, "Metrics JSON (default: stdout)");
    evaluate_cmd->add_option("--clusters", ev_clusters, "Write the k-means partition CSV");
    evaluate_cmd->add_option("--confusion", ev_confusion, "Write the aligned confusion matrix CSV");
    evaluate_cmd->add_option("--silhouette-distances", ev_distances, "Use this .lgd for silhouette");
    add_config(evaluate_cmd);

    // mst
    auto* mst = app.add_subcommand("mst", "Minimum spanning tree of a distance matrix");
    std::string mst_input, mst_output;
    mst->add_option("--input", mst_input, ".lgd input")->required();
    mst->add_option("--output", mst_output, "Tree JSON (default: stdout)");
    add_config(mst);

    // layout
    auto* layout_cmd = app.add_subcommand("layout", "Kamada-Kawai layout of a spanning tree");
    std::string ly_tree, ly_metric, ly_groups, ly_output, ly_svg, ly_targets = "tree-path";
    long ly_max_iter = 0;
    double ly_tol = 1e-6;
    layout_cmd->add_option("--tree", ly_tree, "Tree JSON from 'mst'")->required();
    layout_cmd->add_option("--metric", ly_metric, ".lgd used when --targets metric");
    layout_cmd->add_option("--groups", ly_groups, "Partition CSV used to colour nodes");
    auto* targets_flag = layout_cmd->add_option("--targets", ly_targets, "tree-path | metric")
                             ->check(CLI::IsMember({"tree-path", "metric"}));
    layout_cmd->add_option("--max-iterations", ly_max_iter, "0 means 1000 * n");
    layout_cmd->add_option("--tolerance", ly_tol);
    layout_cmd->add_option("--output", ly_output, "Layout JSON (default: stdout)");
    layout_cmd->add_option("--svg", ly_svg, "Also render an SVG");
    add_config(layout_cmd);

    // synth
    auto* synth = app.add_subcommand("synth", "Planted-family synthetic vectors plus a ready-to-run config");
    SyntheticSpec spec;
    std::string sy_output;
    synth->add_option("--families", spec.families);
    synth->add_option("--members", spec.members_per_family);
    synth->add_option("--bits", spec.bits);
    synth->add_option("--p-proto", spec.p_proto);
    synth->add_option("--p-member", spec.p_member);
    synth->add_option("--runs", spec.runs);
    synth->add_option("--seed", spec.seed);
    synth->add_option("--output", sy_output, "Output directory")->required();
    add_config(synth);

    // pipeline
    auto* pipeline = app.add_subcommand("pipeline", "Distance matrices, aggregation, embedding, evaluation, layout");
    std::string pl_output;
    std::optional<std::uint64_t> pl_seed;
    std::optional<int> pl_restarts;
    std::optional<double> pl_epsilon;
    pipeline->add_option("--config", config.path, "Pipeline JSON")->required()->check(CLI::ExistingFile);
    pipeline->add_option("--output", pl_output, "Output directory (overrides output_dir)");
    pipeline->add_option("--seed", pl_seed);
    pipeline->add_option("--restarts", pl_restarts)->check(CLI::PositiveNumber);
    pipeline->add_option("--epsilon", pl_epsilon);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    if (threads_flag->count() > 0) {
        set_thread_limit(static_cast<unsigned>(threads));
    } else {
        set_thread_limit(thread_limit_from_env());
    }

    try {
        config.load();

        if (score->parsed()) {
            const auto tensors = read_tensors(score_input);
            std::map<std::int64_t, const Tensor*> weights;
            std::map<std::int64_t, HessianAccumulator> hessians;
            for (const auto& t : tensors) {
                if (t.name == "weight") {
                    if (!weights.emplace(t.layer_id, &t).second) {
                        throw ValidationError("layer " + std::to_string(t.layer_id) + " has two weight tensors");
                    }
                } else if (t.name == "calibration") {
                    hessians[t.layer_id].add(t.data);
                }
            }
            if (weights.empty()) {
                throw ValidationError(score_input + " holds no weight tensors");
            }
            const DampingPolicy policy =
                damping_absolute ? DampingPolicy::absolute(*damping_absolute) : DampingPolicy::relative(damping);
            std::vector<Tensor> scores;
            for (const auto& [layer, w] : weights) {
                const auto it = hessians.find(layer);
                if (it == hessians.end()) {
                    throw ValidationError("layer " + std::to_string(layer) + " has no calibration tensor");
                }
                const auto importance = score_layer({w->data, layer}, it->second.finalize(policy));
                scores.push_back({"importance", layer, TensorType::f64, importance.data});
            }
            write_tensors(score_output, scores);
            return exit_ok;
        }

        if (binarize->parsed()) {
            std::vector<LayerBits> blocks;
            for (const auto& t : read_tensors(bin_input)) {
                if (t.name == "importance") {
                    blocks.push_back(binarize_layer(ImportanceMatrix{t.data, t.layer_id}));
                }
            }
            std::sort(blocks.begin(), blocks.end(),
                      [](const LayerBits& a, const LayerBits& b) { return a.layer_id < b.layer_id; });
            write_vector(bin_output, assemble_vector(blocks, bin_tags));
            return exit_ok;
        }

        if (distmat->parsed()) {
            std::vector<fs::path> files(dm_inputs.begin(), dm_inputs.end());
            if (!dm_dir.empty()) {
                const auto found = lgv_files_in(dm_dir);
                files.insert(files.end(), found.begin(), found.end());
            }
            if (dm_run >= 0) {
                const auto parsed = parse_pipeline_config(config.json, config.base_dir);
                if (static_cast<std::size_t>(dm_run) >= parsed.runs.size()) {
                    throw ValidationError("config has no run " + std::to_string(dm_run));
                }
                const auto& run = parsed.runs[static_cast<std::size_t>(dm_run)];
                files.insert(files.end(), run.vectors.begin(), run.vectors.end());
            }
            if (files.empty()) {
                throw ValidationError("distmat needs --inputs, --input-dir or --run");
            }
            std::vector<BinaryLanguageVector> vectors(files.size());
            parallel_for(files.size(), [&](std::size_t i) { vectors[i] = read_vector(files[i]); });
            const auto d = distance_matrix(vectors);
            write_matrix(dm_output, d);
            if (!dm_csv.empty()) {
                write_text_file(dm_csv, matrix_to_csv(d));
            }
            return exit_ok;
        }

        if (aggregate_cmd->parsed()) {
            std::vector<MaskedDistanceMatrix> matrices;
            for (const auto& path : ag_inputs) {
                matrices.push_back(read_matrix(path));
            }
            std::vector<std::string> universe;
            if (ag_universe.empty()) {
                universe = label_union(matrices);
            } else {
                std::istringstream lines(read_text_file(ag_universe));
                for (std::string line; std::getline(lines, line);) {
                    if (!line.empty() && line.back() == '\r') {
                        line.pop_back();
                    }
                    if (!line.empty()) {
                        universe.push_back(line);
                    }
                }
            }
            const auto d = aggregate(matrices, universe);
            write_matrix(ag_output, d);
            if (!ag_csv.empty()) {
                write_text_file(ag_csv, matrix_to_csv(d));
            }
            const auto report = coverage(d);
            if (!report.complete()) {
                err << "warning: aggregate is incomplete\n" << report.describe() << "\n";
            }
            return exit_ok;
        }

        if (embed->parsed()) {
            config.fill(epsilon_flag, epsilon, {"epsilon"});
            MissingPairPolicy policy = parse_missing(em_missing);
            if (missing_flag->count() == 0) {
                if (const auto* node = config.find({"missing"})) {
                    if (node->is_object()) {
                        policy = MissingPairPolicy::impute;
                        if (impute_flag->count() == 0) {
                            impute_value = node->value("impute", 0.0);
                        }
                    } else {
                        policy = parse_missing(node->get<std::string>());
                    }
                }
            }
            MaskedDistanceMatrix d = read_matrix(em_input);
            switch (policy) {
            case MissingPairPolicy::fail:
                break;
            case MissingPairPolicy::drop:
                d = drop_uncovered(d);
                break;
            case MissingPairPolicy::impute:
                d = impute_missing(d, impute_value);
                break;
            }
            const auto embedding = torgerson(d, epsilon);
            write_text_file(em_output, embedding_to_csv(embedding));
            write_text_file(em_sidecar.empty() ? sidecar_path_for(em_output) : em_sidecar,
                            embedding_sidecar(embedding).dump(2) + "\n");
            const auto rep = reconstruction_report(d, embedding);
            err << "dimension " << embedding.dimension() << ", negative eigenvalue mass "
                << format_double(rep.negative_eigenvalue_mass) << "\n";
            return exit_ok;
        }

        if (cluster->parsed()) {
            config.fill(cl_seed_flag, seed, {"kmeans", "seed"});
            config.fill(cl_restarts_flag, restarts, {"kmeans", "restarts"});
            const auto embedding = read_embedding(cl_input, {});
            const auto result = kmeans(embedding, cl_k, seed, restarts);
            emit_text(cl_output, partition_to_csv(result.partition), out);
            return exit_ok;
        }

        if (evaluate_cmd->parsed()) {
            config.fill(ev_seed_flag, seed, {"kmeans", "seed"});
            config.fill(ev_restarts_flag, restarts, {"kmeans", "restarts"});
            const auto embedding = read_embedding(ev_embedding, {});
            const auto reference = read_partition(ev_reference);
            std::optional<MaskedDistanceMatrix> distances;
            if (!ev_distances.empty()) {
                distances = read_matrix(ev_distances);
            }
            const auto report = evaluate(embedding, reference, seed, restarts, distances ? &*distances : nullptr);
            const std::string name = ev_name.empty() ? fs::path(ev_reference).stem().string() : ev_name;
            emit_text(ev_output, metrics_document(name, report, seed, restarts).dump(2) + "\n", out);
            if (!ev_clusters.empty()) {
                write_text_file(ev_clusters, partition_to_csv(report.clustering.partition));
            }
            if (!ev_confusion.empty()) {
                write_text_file(ev_confusion, confusion_to_csv(report.alignment.aligned()));
            }
            return exit_ok;
        }

        if (mst->parsed()) {
            const auto tree = minimum_spanning_tree(read_matrix(mst_input));
            emit_text(mst_output, tree_to_json(tree).dump(2) + "\n", out);
            return exit_ok;
        }

        if (layout_cmd->parsed()) {
            if (targets_flag->count() == 0) {
                if (const auto* node = config.find({"layout", "targets"})) {
                    ly_targets = node->get<std::string>();
                }
            }
            const auto tree = tree_from_json(read_json(ly_tree));
            LayoutOptions options;
            options.targets = parse_targets(ly_targets);
            options.max_iterations = ly_max_iter;
            options.tolerance = ly_tol;
            std::optional<MaskedDistanceMatrix> metric;
            if (options.targets == LayoutTargets::metric) {
                if (ly_metric.empty()) {
                    throw ValidationError("--targets metric needs --metric");
                }
                metric = read_matrix(ly_metric);
            }
            const auto layout = kamada_kawai(tree, options, metric ? &*metric : nullptr);
            std::optional<LabeledPartition> groups;
            if (!ly_groups.empty()) {
                groups = read_partition(ly_groups).restricted_to(tree.nodes);
            }
            const auto doc = export_layout(tree, layout, groups ? &*groups : nullptr);
            emit_text(ly_output, doc.dump(2) + "\n", out);
            if (!ly_svg.empty()) {
                write_text_file(ly_svg, render_svg(doc));
            }
            return exit_ok;
        }

        if (synth->parsed()) {
            const auto data = synth_generate(spec);
            const fs::path dir(sy_output);
            fs::create_directories(dir);
            nlohmann::json runs = nlohmann::json::array();
            for (std::size_t r = 0; r < data.runs.size(); ++r) {
                const std::string sub = "run_" + std::to_string(r);
                fs::create_directories(dir / sub);
                for (const auto& v : data.runs[r]) {
                    write_vector(dir / sub / (v.language() + ".lgv"), v);
                }
                const auto& tags = data.runs[r].front().tags;
                runs.push_back({{"model", tags.model}, {"corpus", tags.corpus}, {"vector_dir", sub}});
            }
            write_text_file(dir / "truth.csv", partition_to_csv(data.truth));
            const nlohmann::json pipeline_config{
                {"runs", runs},
                {"epsilon", default_mds_epsilon},
                {"kmeans", {{"seed", spec.seed}, {"restarts", 10}}},
                {"references", {{{"name", "truth"}, {"path", "truth.csv"}}}},
                {"output_dir", "out"}};
            write_text_file(dir / "pipeline.json", pipeline_config.dump(2) + "\n");
            return exit_ok;
        }

        if (pipeline->parsed()) {
            PipelineConfig pc = parse_pipeline_config(config.json, config.base_dir);
            if (!pl_output.empty()) {
                pc.output_dir = pl_output;
            }
            if (pl_seed) {
                pc.seed = *pl_seed;
            }
            if (pl_restarts) {
                pc.restarts = *pl_restarts;
            }
            if (pl_epsilon) {
                pc.epsilon = *pl_epsilon;
            }
            const auto result = run_pipeline(pc);
            out << "vectors " << result.vector_count << ", languages " << result.aggregate.size() << ", embedded "
                << result.embedded.size() << ", dimension " << result.embedding.dimension() << "\n";
            for (const auto& e : result.evaluations) {
                out << e.reference << ": silhouette " << format_double(e.report.silhouette) << ", ari "
                    << format_double(e.report.ari) << ", purity " << format_double(e.report.purity) << "\n";
            }
            return exit_ok;
        }
    } catch (const CoverageError& e) {
        err << "error: " << e.what() << "\n" << e.report().describe() << "\n";
        return exit_invalid;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << "\n";
        return exit_numeric;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_invalid;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return exit_invalid;
    }
    return exit_usage;
}

int run_cli(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(args, std::cout, std::cerr);
}

} // namespace langgeo
