#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "typevec/reduce.hpp"
#include "typevec/rules.hpp"
#include "typevec/typer.hpp"

namespace typevec {

// --- coreference arc prediction ---------------------------------------------

struct CapExample {
    std::vector<std::string> mention1, context1;
    std::vector<std::string> mention2, context2;
    int label = 0;  // 1 = coreferent
};

// JSON Lines {"mention1","context1","mention2","context2","label":0|1}.
std::vector<CapExample> load_cap_dataset(const std::string& path);

// Coreferent iff cosine(t1, t2) is strictly greater than the threshold.
bool cap_predict(const TypeVector& t1, const TypeVector& t2, double threshold);

// Supplies the type vector for one side (0 or 1) of a CAP example.
using CapVectorProvider = std::function<TypeVector(std::size_t example_index, int side)>;

struct CapReport {
    double accuracy = 0.0;
    std::size_t total = 0;
    std::size_t correct = 0;
    std::size_t true_positive = 0, true_negative = 0;
    std::size_t false_positive = 0, false_negative = 0;
    std::size_t errors = 0;  // per-example failures, counted incorrect
    std::vector<std::string> diagnostics;
};

// Mean per-example correctness plus confusion counts. Per-example failures
// (for instance an undefined cosine) count as incorrect and are reported.
CapReport cap_evaluate(const CapVectorProvider& vectors,
                       const std::vector<CapExample>& examples, double threshold);
CapReport cap_evaluate(const TyperModel& model, const std::vector<CapExample>& examples,
                       double threshold);

// --- named entity disambiguation ---------------------------------------------

struct CandidateEntity {
    std::string id;
    std::vector<std::string> description_mention;  // candidate title tokens
    std::vector<std::string> description;
    double prior = 0.0;
};

struct NedExample {
    std::vector<std::string> mention, context;
    std::optional<std::vector<std::string>> title;
    std::optional<std::vector<std::string>> first_sentence;
    std::vector<CandidateEntity> candidates;
    std::size_t gold_index = 0;
    bool title_prepended = false;  // prepend_title_context applied marker
};

// JSON Lines {"mention","context","title":null|string,"first_sentence":null|string,
// "candidates":[{"id","title","description","prior"}],"gold_index":int}.
// When max_candidates > 0 the declared cap is enforced: records carrying
// more candidates are rejected.
std::vector<NedExample> load_ned_dataset(const std::string& path,
                                         std::size_t max_candidates = 0);

// Context becomes title ++ first_sentence ++ context when both are present.
// May be applied exactly once per example; a second call is an error.
NedExample prepend_title_context(NedExample example);

// Argmax of cosine(mention_vec, candidate). Ties go to the lowest index.
// Zero-norm candidates are excluded (with a warning appended); when every
// candidate is excluded the prediction is undefined.
std::size_t ned_predict(const TypeVector& mention_vec,
                        std::span<const TypeVector> candidate_vecs,
                        std::vector<std::string>* warnings = nullptr);

// Argmax of the candidate priors; ties go to the lowest index.
std::size_t most_frequent_baseline(const NedExample& example);

// One NED decision flattened to vectors. Mention/context tokens stay around
// so debugging rules can match.
struct NedInstance {
    std::vector<std::string> mention, context;
    TypeVector mention_vec;
    std::vector<TypeVector> candidate_vecs;
    std::size_t gold_index = 0;
};

struct NedOptions {
    const CompiledRuleSet* rules = nullptr;        // applied to mention vectors only
    const ReducedVocabulary* reduced = nullptr;    // projection, both sides
};

struct NedReport {
    double accuracy = 0.0;
    std::size_t total = 0;
    std::size_t correct = 0;
    std::size_t errors = 0;  // failed examples, counted incorrect
    std::vector<std::string> diagnostics;
};

// Fraction of instances where ned_predict returns gold_index. Rules (if any)
// rewrite the mention vector before scoring; projection (if any) applies to
// both sides afterwards. Failed instances count as incorrect.
NedReport ned_evaluate_instances(const std::vector<NedInstance>& instances,
                                 const NedOptions& options = {});

// Builds instances with the paper-style two-model scheme: mention vectors
// from the context-trained model, candidate vectors from the
// description-trained model; the title/first-sentence prefix is applied once
// per example. Then defers to ned_evaluate_instances.
NedReport ned_evaluate(const TyperModel& context_model,
                       const TyperModel& description_model,
                       const std::vector<NedExample>& examples,
                       const NedOptions& options = {});

// Instance construction shared by ned_evaluate and the CLI (exposed so pair
// building for mask training can reuse it).
NedInstance make_ned_instance(const TyperModel& context_model,
                              const TyperModel& description_model,
                              const NedExample& example);

}  // namespace typevec
