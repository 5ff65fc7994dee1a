#include "typevec/tasks.hpp"

#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "typevec/errors.hpp"
#include "typevec/sim.hpp"
#include "typevec/text.hpp"

namespace typevec {

using nlohmann::json;

namespace {

json parse_line(const std::string& line, const std::string& path, std::size_t lineno) {
    try {
        return json::parse(line);
    } catch (const json::exception& e) {
        throw data_error(path + ":" + std::to_string(lineno) +
                         ": malformed JSON: " + e.what());
    }
}

std::string loc(const std::string& path, std::size_t lineno) {
    return path + ":" + std::to_string(lineno);
}

std::vector<std::string> tokens_field(const json& record, const char* name,
                                      const std::string& path, std::size_t lineno) {
    if (!record.contains(name) || !record[name].is_string()) {
        throw data_error(loc(path, lineno) + ": missing string field '" + name + "'");
    }
    return tokenize(record[name].get<std::string>());
}

}  // namespace

std::vector<CapExample> load_cap_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open CAP dataset: " + path);
    std::vector<CapExample> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json record = parse_line(line, path, lineno);
        CapExample ex;
        ex.mention1 = tokens_field(record, "mention1", path, lineno);
        ex.context1 = tokens_field(record, "context1", path, lineno);
        ex.mention2 = tokens_field(record, "mention2", path, lineno);
        ex.context2 = tokens_field(record, "context2", path, lineno);
        if (ex.mention1.empty() || ex.mention2.empty()) {
            throw data_error(loc(path, lineno) + ": mentions must be non-empty");
        }
        if (!record.contains("label") || !record["label"].is_number_integer()) {
            throw data_error(loc(path, lineno) + ": missing integer field 'label'");
        }
        ex.label = record["label"].get<int>();
        if (ex.label != 0 && ex.label != 1) {
            throw data_error(loc(path, lineno) + ": label must be 0 or 1");
        }
        out.push_back(std::move(ex));
    }
    return out;
}

bool cap_predict(const TypeVector& t1, const TypeVector& t2, double threshold) {
    return cosine(t1, t2) > threshold;
}

CapReport cap_evaluate(const CapVectorProvider& vectors,
                       const std::vector<CapExample>& examples, double threshold) {
    if (examples.empty()) throw data_error("cap_evaluate: empty example list");
    CapReport report;
    report.total = examples.size();
    for (std::size_t i = 0; i < examples.size(); ++i) {
        const auto& ex = examples[i];
        bool predicted;
        try {
            predicted = cap_predict(vectors(i, 0), vectors(i, 1), threshold);
        } catch (const std::exception& e) {
            ++report.errors;
            report.diagnostics.push_back("example " + std::to_string(i) + ": " +
                                         e.what());
            continue;  // counted incorrect
        }
        const bool gold = ex.label == 1;
        if (predicted == gold) {
            ++report.correct;
            ++(predicted ? report.true_positive : report.true_negative);
        } else {
            ++(predicted ? report.false_positive : report.false_negative);
        }
    }
    report.accuracy =
        static_cast<double>(report.correct) / static_cast<double>(report.total);
    return report;
}

CapReport cap_evaluate(const TyperModel& model, const std::vector<CapExample>& examples,
                       double threshold) {
    CapVectorProvider provider = [&](std::size_t i, int side) {
        const auto& ex = examples[i];
        return side == 0 ? embed_mention(model, ex.mention1, ex.context1)
                         : embed_mention(model, ex.mention2, ex.context2);
    };
    return cap_evaluate(provider, examples, threshold);
}

std::vector<NedExample> load_ned_dataset(const std::string& path,
                                         std::size_t max_candidates) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open NED dataset: " + path);
    std::vector<NedExample> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json record = parse_line(line, path, lineno);

        NedExample ex;
        ex.mention = tokens_field(record, "mention", path, lineno);
        ex.context = tokens_field(record, "context", path, lineno);
        if (ex.mention.empty()) {
            throw data_error(loc(path, lineno) + ": mention must be non-empty");
        }
        if (record.contains("title") && !record["title"].is_null()) {
            if (!record["title"].is_string())
                throw data_error(loc(path, lineno) + ": title must be a string or null");
            ex.title = tokenize(record["title"].get<std::string>());
        }
        if (record.contains("first_sentence") && !record["first_sentence"].is_null()) {
            if (!record["first_sentence"].is_string())
                throw data_error(loc(path, lineno) +
                                 ": first_sentence must be a string or null");
            ex.first_sentence = tokenize(record["first_sentence"].get<std::string>());
        }

        if (!record.contains("candidates") || !record["candidates"].is_array() ||
            record["candidates"].empty()) {
            throw data_error(loc(path, lineno) +
                             ": candidates must be a non-empty array");
        }
        if (max_candidates > 0 && record["candidates"].size() > max_candidates) {
            throw data_error(loc(path, lineno) + ": " +
                             std::to_string(record["candidates"].size()) +
                             " candidates exceed the declared cap of " +
                             std::to_string(max_candidates));
        }
        std::unordered_set<std::string> ids;
        for (const auto& jc : record["candidates"]) {
            CandidateEntity cand;
            if (!jc.contains("id") || !jc["id"].is_string())
                throw data_error(loc(path, lineno) + ": candidate missing string 'id'");
            cand.id = jc["id"].get<std::string>();
            if (!ids.insert(cand.id).second)
                throw data_error(loc(path, lineno) + ": duplicate candidate id '" +
                                 cand.id + "'");
            cand.description_mention = tokens_field(jc, "title", path, lineno);
            cand.description = tokens_field(jc, "description", path, lineno);
            if (!jc.contains("prior") || !jc["prior"].is_number())
                throw data_error(loc(path, lineno) + ": candidate missing number 'prior'");
            cand.prior = jc["prior"].get<double>();
            if (!(cand.prior >= 0.0 && cand.prior <= 1.0))
                throw data_error(loc(path, lineno) + ": prior " +
                                 std::to_string(cand.prior) + " out of [0,1]");
            ex.candidates.push_back(std::move(cand));
        }
        if (!record.contains("gold_index") || !record["gold_index"].is_number_integer())
            throw data_error(loc(path, lineno) + ": missing integer field 'gold_index'");
        const auto gold = record["gold_index"].get<std::int64_t>();
        if (gold < 0 || static_cast<std::size_t>(gold) >= ex.candidates.size())
            throw data_error(loc(path, lineno) + ": gold_index out of range");
        ex.gold_index = static_cast<std::size_t>(gold);
        out.push_back(std::move(ex));
    }
    return out;
}

NedExample prepend_title_context(NedExample example) {
    if (example.title_prepended) {
        throw data_error("prepend_title_context applied twice to one example");
    }
    if (example.title && example.first_sentence) {
        std::vector<std::string> context;
        context.reserve(example.title->size() + example.first_sentence->size() +
                        example.context.size());
        context.insert(context.end(), example.title->begin(), example.title->end());
        context.insert(context.end(), example.first_sentence->begin(),
                       example.first_sentence->end());
        context.insert(context.end(), example.context.begin(), example.context.end());
        example.context = std::move(context);
    }
    example.title_prepended = true;
    return example;
}

std::size_t ned_predict(const TypeVector& mention_vec,
                        std::span<const TypeVector> candidate_vecs,
                        std::vector<std::string>* warnings) {
    if (candidate_vecs.empty()) throw data_error("ned_predict: no candidates");
    bool found = false;
    std::size_t best = 0;
    double best_score = 0.0;
    for (std::size_t j = 0; j < candidate_vecs.size(); ++j) {
        double score;
        try {
            score = cosine(mention_vec, candidate_vecs[j]);
        } catch (const numeric_error& e) {
            if (warnings) {
                warnings->push_back("candidate " + std::to_string(j) + " excluded: " +
                                    e.what());
            }
            continue;
        }
        if (!found || score > best_score) {
            found = true;
            best = j;
            best_score = score;
        }
    }
    if (!found) {
        throw numeric_error("ned_predict: every candidate was excluded");
    }
    return best;
}

std::size_t most_frequent_baseline(const NedExample& example) {
    if (example.candidates.empty()) throw data_error("most_frequent_baseline: no candidates");
    std::size_t best = 0;
    for (std::size_t j = 1; j < example.candidates.size(); ++j) {
        if (example.candidates[j].prior > example.candidates[best].prior) best = j;
    }
    return best;
}

NedReport ned_evaluate_instances(const std::vector<NedInstance>& instances,
                                 const NedOptions& options) {
    if (instances.empty()) throw data_error("ned_evaluate: empty instance list");
    NedReport report;
    report.total = instances.size();
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const auto& inst = instances[i];
        try {
            TypeVector mention_vec = inst.mention_vec;
            if (options.rules) {
                mention_vec =
                    apply_rules(mention_vec, *options.rules, inst.mention, inst.context);
            }
            std::size_t predicted;
            if (options.reduced) {
                TypeVector projected = project_vector(mention_vec, *options.reduced);
                std::vector<TypeVector> candidates;
                candidates.reserve(inst.candidate_vecs.size());
                for (const auto& c : inst.candidate_vecs) {
                    candidates.push_back(project_vector(c, *options.reduced));
                }
                predicted = ned_predict(projected, candidates);
            } else {
                predicted = ned_predict(mention_vec, inst.candidate_vecs);
            }
            if (predicted == inst.gold_index) ++report.correct;
        } catch (const std::exception& e) {
            ++report.errors;
            report.diagnostics.push_back("instance " + std::to_string(i) + ": " +
                                         e.what());
        }
    }
    report.accuracy =
        static_cast<double>(report.correct) / static_cast<double>(report.total);
    return report;
}

NedInstance make_ned_instance(const TyperModel& context_model,
                              const TyperModel& description_model,
                              const NedExample& example) {
    NedExample ex = example.title_prepended ? example : prepend_title_context(example);
    NedInstance inst;
    inst.mention = ex.mention;
    inst.context = ex.context;
    inst.gold_index = ex.gold_index;
    inst.mention_vec = embed_mention(context_model, ex.mention, ex.context);
    inst.candidate_vecs.reserve(ex.candidates.size());
    for (const auto& cand : ex.candidates) {
        inst.candidate_vecs.push_back(
            embed_mention(description_model, cand.description_mention, cand.description));
    }
    return inst;
}

NedReport ned_evaluate(const TyperModel& context_model,
                       const TyperModel& description_model,
                       const std::vector<NedExample>& examples,
                       const NedOptions& options) {
    if (examples.empty()) throw data_error("ned_evaluate: empty example list");
    if (context_model.vocab.id != description_model.vocab.id) {
        throw data_error("ned_evaluate: context and description models use different "
                         "vocabularies");
    }
    NedReport report;
    report.total = examples.size();
    std::vector<NedInstance> instances;
    std::vector<std::size_t> instance_examples;
    instances.reserve(examples.size());
    for (std::size_t i = 0; i < examples.size(); ++i) {
        try {
            instances.push_back(
                make_ned_instance(context_model, description_model, examples[i]));
            instance_examples.push_back(i);
        } catch (const std::exception& e) {
            ++report.errors;
            report.diagnostics.push_back("example " + std::to_string(i) + ": " +
                                         e.what());
        }
    }
    if (!instances.empty()) {
        NedReport inner = ned_evaluate_instances(instances, options);
        report.correct = inner.correct;
        report.errors += inner.errors;
        for (const auto& d : inner.diagnostics) report.diagnostics.push_back(d);
    }
    report.accuracy =
        static_cast<double>(report.correct) / static_cast<double>(report.total);
    return report;
}

}  // namespace typevec
