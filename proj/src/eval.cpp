#include "lexblend/eval.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "lexblend/errors.hpp"

namespace lexblend {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = line.find(sep, pos);
    out.push_back(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename F>
void for_each_line(std::string_view text, F f) {
  std::size_t pos = 0;
  std::size_t number = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    f(++number, text.substr(pos, nl - pos));
    pos = nl + 1;
  }
}

// Splits a sentence at its single run of three or more underscores.
bool split_gap(std::string_view sentence, std::string_view& left, std::string_view& right) {
  const std::size_t start = sentence.find("___");
  if (start == std::string_view::npos) return false;
  std::size_t end = start;
  while (end < sentence.size() && sentence[end] == '_') ++end;
  if (sentence.find("___", end) != std::string_view::npos) return false;
  left = sentence.substr(0, start);
  right = sentence.substr(end);
  return true;
}

std::string single_token(std::string_view text, std::size_t line) {
  auto tokens = tokenize_words(text);
  if (tokens.size() != 1)
    throw ParseError(line, "candidate '" + std::string(text) + "' is not a single word");
  return std::move(tokens.front());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::vector<ChallengeItem> parse_challenge(std::string_view text) {
  std::vector<ChallengeItem> items;
  for_each_line(text, [&](std::size_t number, std::string_view raw) {
    const std::string_view line = trim(raw);
    if (line.empty()) return;
    const auto fields = split(raw.back() == '\r' ? raw.substr(0, raw.size() - 1) : raw, '\t');
    if (items.empty() && trim(fields.front()) == "id") return;
    if (fields.size() != 3 + kCandidateCount)
      throw ParseError(number, "expected " + std::to_string(3 + kCandidateCount) +
                                   " tab-separated fields, got " + std::to_string(fields.size()));
    ChallengeItem item;
    item.id = std::string(trim(fields[0]));
    std::string_view left, right;
    if (!split_gap(fields[1], left, right)) throw ParseError(number, "sentence needs exactly one ___ gap");
    item.before = tokenize_words(left);
    item.after = tokenize_words(right);
    for (std::size_t c = 0; c < kCandidateCount; ++c) item.candidates[c] = single_token(fields[2 + c], number);
    const std::string_view answer = trim(fields[2 + kCandidateCount]);
    if (answer.size() != 1 || answer[0] < 'a' || answer[0] > 'e')
      throw ParseError(number, "answer must be a letter a-e");
    item.answer = static_cast<std::size_t>(answer[0] - 'a');
    items.push_back(std::move(item));
  });
  return items;
}

std::vector<ChallengeItem> load_challenge(const std::filesystem::path& path) {
  return parse_challenge(read_file(path));
}

void write_challenge(std::ostream& out, std::span<const ChallengeItem> items) {
  out << "id\tsentence\ta\tb\tc\td\te\tanswer\n";
  for (const auto& item : items) {
    out << item.id << '\t';
    for (const auto& w : item.before) out << w << ' ';
    out << "___";
    for (const auto& w : item.after) out << ' ' << w;
    for (const auto& c : item.candidates) out << '\t' << c;
    out << '\t' << static_cast<char>('a' + item.answer) << '\n';
  }
}

std::vector<ChallengeItem> convert_msr(std::string_view questions, std::string_view answers) {
  struct Question {
    std::string sentence;  // with ___ in place of the bracketed word
    std::array<std::string, kCandidateCount> candidates;
    std::array<bool, kCandidateCount> seen{};
  };
  auto parse_label = [](std::string_view line, std::size_t number, int& id, std::size_t& letter,
                        std::string_view& rest) {
    const auto paren = line.find(')');
    if (paren == std::string_view::npos || paren < 2) throw ParseError(number, "missing '<n><letter>)' label");
    const char l = line[paren - 1];
    if (l < 'a' || l > 'e') throw ParseError(number, "label letter must be a-e");
    const auto digits = line.substr(0, paren - 1);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), id);
    if (ec != std::errc{} || ptr != digits.data() + digits.size()) throw ParseError(number, "bad question number");
    letter = static_cast<std::size_t>(l - 'a');
    rest = trim(line.substr(paren + 1));
  };
  auto bracketed = [](std::string_view rest, std::size_t number, std::string& sentence) {
    const auto open = rest.find('[');
    const auto close = rest.find(']', open);
    if (open == std::string_view::npos || close == std::string_view::npos)
      throw ParseError(number, "missing [candidate]");
    sentence = std::string(rest.substr(0, open)) + "___" + std::string(rest.substr(close + 1));
    return rest.substr(open + 1, close - open - 1);
  };

  std::map<int, Question> byId;
  for_each_line(questions, [&](std::size_t number, std::string_view raw) {
    const std::string_view line = trim(raw);
    if (line.empty()) return;
    int id = 0;
    std::size_t letter = 0;
    std::string_view rest;
    parse_label(line, number, id, letter, rest);
    Question& q = byId[id];
    std::string sentence;
    q.candidates[letter] = single_token(bracketed(rest, number, sentence), number);
    q.seen[letter] = true;
    if (q.sentence.empty()) q.sentence = std::move(sentence);
  });

  std::map<int, std::size_t> answerOf;
  for_each_line(answers, [&](std::size_t number, std::string_view raw) {
    const std::string_view line = trim(raw);
    if (line.empty()) return;
    int id = 0;
    std::size_t letter = 0;
    std::string_view rest;
    parse_label(line, number, id, letter, rest);
    answerOf[id] = letter;
  });

  std::vector<ChallengeItem> items;
  for (const auto& [id, q] : byId) {
    if (!std::all_of(q.seen.begin(), q.seen.end(), [](bool b) { return b; }))
      throw ParseError(0, "question " + std::to_string(id) + " lacks five candidates");
    auto it = answerOf.find(id);
    if (it == answerOf.end()) throw ParseError(0, "question " + std::to_string(id) + " has no answer");
    std::string_view left, right;
    split_gap(q.sentence, left, right);
    items.push_back({std::to_string(id), tokenize_words(left), tokenize_words(right), q.candidates, it->second});
  }
  return items;
}

std::vector<FoldConfig> make_folds(std::size_t item_count, std::uint64_t seed) {
  if (item_count < kFoldCount) throw std::invalid_argument("need at least five items for five folds");
  std::vector<std::size_t> order(item_count);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = item_count - 1; i > 0; --i) std::swap(order[i], order[rng() % (i + 1)]);

  std::array<std::vector<std::size_t>, kFoldCount> groups;
  for (std::size_t p = 0; p < item_count; ++p) groups[p % kFoldCount].push_back(order[p]);
  for (auto& g : groups) std::sort(g.begin(), g.end());

  std::vector<FoldConfig> folds;
  for (int c = 1; c <= static_cast<int>(kFoldCount); ++c) {
    FoldConfig f;
    f.config_id = c;
    f.test_group = c;
    f.test_items = groups[static_cast<std::size_t>(c - 1)];
    std::size_t slot = 0;
    for (int g = 1; g <= static_cast<int>(kFoldCount); ++g) {
      if (g == c) continue;
      f.optimization_groups[slot++] = g;
      const auto& members = groups[static_cast<std::size_t>(g - 1)];
      f.optimization_items.insert(f.optimization_items.end(), members.begin(), members.end());
    }
    std::sort(f.optimization_items.begin(), f.optimization_items.end());
    folds.push_back(std::move(f));
  }
  return folds;
}

GapContext item_context(const ChallengeItem& item, const Vocabulary& vocab, std::size_t history) {
  std::vector<WordId> candidates;
  for (const auto& c : item.candidates) candidates.push_back(vocab.id(c));
  return make_context(vocab.lookup(item.before), vocab.lookup(item.after), std::move(candidates), history);
}

std::vector<TrainStep> make_steps(std::span<const ChallengeItem> items,
                                  std::span<const std::size_t> selection, const Vocabulary& vocab,
                                  std::size_t history) {
  std::vector<TrainStep> steps;
  steps.reserve(selection.size());
  for (const std::size_t i : selection) steps.push_back({item_context(items[i], vocab, history), items[i].answer});
  return steps;
}

double accuracy(std::span<const ChallengeItem> items, const Scorer& scorer) {
  if (items.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& item : items)
    if (scorer(item) == item.answer) ++hits;
  return static_cast<double>(hits) / static_cast<double>(items.size());
}

double accuracy(std::span<const ChallengeItem> items, const Model& model, const ModelParams& params,
                std::size_t history, std::optional<double> alpha_override) {
  return accuracy(items, [&](const ChallengeItem& item) {
    return predict(model, item_context(item, model.vocab, history), params, alpha_override).front().index;
  });
}

std::vector<ChallengeItem> select(std::span<const ChallengeItem> items,
                                  std::span<const std::size_t> indices) {
  std::vector<ChallengeItem> out;
  out.reserve(indices.size());
  for (const std::size_t i : indices) out.push_back(items[i]);
  return out;
}

ConfigRun run_config(const Model& model, std::span<const ChallengeItem> items, const FoldConfig& fold,
                     const OptimizeSettings& settings) {
  ConfigRun run;
  run.config_id = fold.config_id;
  run.initial = ModelParams::random(settings.history, settings.seed + static_cast<std::uint64_t>(fold.config_id));
  run.initial.eta_alpha = settings.eta_alpha;
  run.initial.eta_lambda = settings.eta_lambda;

  const auto steps = prepare_steps(model, make_steps(items, fold.optimization_items, model.vocab, settings.history));
  auto [optimized, trace] = run_optimization(steps, run.initial, settings.epochs);
  run.optimized = std::move(optimized);
  run.trace = std::move(trace);

  const auto test = select(items, fold.test_items);
  run.initial_accuracy = accuracy(test, model, run.initial, settings.history);
  run.optimized_accuracy = accuracy(test, model, run.optimized, settings.history);
  return run;
}

std::vector<SweepRow> history_sweep(const Model& model, std::span<const ChallengeItem> items,
                                    const FoldConfig& fold, OptimizeSettings settings,
                                    std::size_t from, std::size_t to) {
  if (from == 0 || from > to) throw std::invalid_argument("bad history range");
  const auto test = select(items, fold.test_items);
  std::vector<SweepRow> rows;
  for (std::size_t n = from; n <= to; ++n) {
    settings.history = n;
    const ConfigRun run = run_config(model, items, fold, settings);
    SweepRow row;
    row.history = n;
    row.alpha = run.optimized.alpha;
    row.hybrid = run.optimized_accuracy;
    row.bayes_only = accuracy(test, model, run.optimized, n, 1.0);
    row.lsa_only = accuracy(test, model, run.optimized, n, 0.0);
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "history,bayes_only,lsa_only,hybrid,alpha\n" << std::setprecision(17);
  for (const auto& r : rows)
    out << r.history << ',' << r.bayes_only << ',' << r.lsa_only << ',' << r.hybrid << ',' << r.alpha << '\n';
}

std::vector<LambdaRow> lambda_profile(const ModelParams& params) {
  std::vector<LambdaRow> rows;
  auto side = [&](char tag, const std::vector<double>& lambdas) {
    const SideExponents e = exponents(params, tag == 'b' ? lambdas.size() + 1 : 0,
                                      tag == 'a' ? lambdas.size() + 1 : 0);
    const auto& ex = tag == 'b' ? e.before : e.after;
    for (std::size_t d = 0; d < ex.size(); ++d) rows.push_back({tag, d, ex[d]});
  };
  side('b', params.lambda_before);
  side('a', params.lambda_after);
  return rows;
}

void write_lambda_csv(std::ostream& out, std::span<const LambdaRow> rows) {
  out << "side,distance,weight\n" << std::setprecision(17);
  for (const auto& r : rows) out << (r.side == 'b' ? "before" : "after") << ',' << r.distance << ',' << r.weight << '\n';
}

ModelParams read_lambda_csv(std::istream& in) {
  ModelParams params;
  std::map<std::size_t, double> before, after;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty() || line.rfind("side,", 0) == 0) continue;
    const auto fields = split(trim(line), ',');
    if (fields.size() != 3) throw ParseError(number, "expected side,distance,weight");
    std::size_t d = 0;
    auto [p, ec] = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), d);
    if (ec != std::errc{}) throw ParseError(number, "bad distance");
    const double w = std::stod(std::string(fields[2]));
    if (d == 0) continue;
    if (fields[0] == "before") before[d] = w;
    else if (fields[0] == "after") after[d] = w;
    else throw ParseError(number, "side must be before or after");
  }
  for (const auto& [d, w] : before) {
    if (d != params.lambda_before.size() + 1) throw ParseError(0, "before distances are not contiguous");
    params.lambda_before.push_back(w);
  }
  for (const auto& [d, w] : after) {
    if (d != params.lambda_after.size() + 1) throw ParseError(0, "after distances are not contiguous");
    params.lambda_after.push_back(w);
  }
  return params;
}

}  // namespace lexblend
