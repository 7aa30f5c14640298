#include "lexblend/service.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <stdexcept>

#include <httplib.h>
#include <json.hpp>

#include "lexblend/errors.hpp"

namespace lexblend {

using json = nlohmann::json;

namespace {

HttpReply error_reply(int status, const std::string& message) {
  return {status, json{{"error", message}}.dump()};
}

struct BadRequest : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> read_words(const json& doc, const char* field) {
  std::vector<std::string> out;
  if (!doc.contains(field) || doc[field].is_null()) return out;
  const json& arr = doc[field];
  if (!arr.is_array()) throw BadRequest(std::string(field) + " must be an array of words");
  for (const auto& w : arr) {
    if (!w.is_string()) throw BadRequest(std::string(field) + " must contain strings");
    auto tokens = tokenize_words(w.get<std::string>());
    if (tokens.empty()) throw BadRequest(std::string(field) + " contains an empty word");
    for (auto& t : tokens) out.push_back(std::move(t));
  }
  return out;
}

SuggestRequest parse_request(std::string_view body) {
  const json doc = json::parse(body.begin(), body.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw BadRequest("body must be a JSON object");
  SuggestRequest req;
  req.before = read_words(doc, "before");
  req.after = read_words(doc, "after");
  if (doc.contains("k")) {
    if (!doc["k"].is_number_integer() || doc["k"].get<long long>() < 1)
      throw BadRequest("k must be a positive integer");
    req.k = static_cast<std::size_t>(doc["k"].get<long long>());
  }
  if (doc.contains("candidates") && !doc["candidates"].is_null()) {
    auto c = read_words(doc, "candidates");
    if (c.empty()) throw BadRequest("candidates must not be empty when given");
    req.candidates = std::move(c);
  }
  if (doc.contains("alpha") && !doc["alpha"].is_null()) {
    if (!doc["alpha"].is_number()) throw BadRequest("alpha must be a number");
    const double a = doc["alpha"].get<double>();
    if (!(a >= 0.0 && a <= 1.0)) throw BadRequest("alpha must lie in [0, 1]");
    req.alpha = a;
  }
  return req;
}

}  // namespace

SuggestionService::SuggestionService(Model model, ModelParams params, std::size_t open_vocabulary)
    : model_(std::move(model)), params_(std::move(params)) {
  std::vector<WordId> ids(model_.vocab.size());
  std::iota(ids.begin(), ids.end(), WordId{0});
  const std::size_t m = std::min(open_vocabulary, ids.size());
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(m), ids.end(),
                    [&](WordId a, WordId b) {
                      const auto ca = model_.vocab.count(a), cb = model_.vocab.count(b);
                      return ca != cb ? ca > cb : a < b;
                    });
  ids.resize(m);
  open_candidates_ = std::move(ids);
}

HttpReply SuggestionService::suggest(std::string_view json_body) const {
  try {
    return suggest(parse_request(json_body));
  } catch (const BadRequest& e) {
    return error_reply(400, e.what());
  }
}

HttpReply SuggestionService::suggest(const SuggestRequest& request) const {
  if (request.k == 0) return error_reply(400, "k must be a positive integer");
  if (request.before.empty() && request.after.empty() && !request.candidates)
    return error_reply(422, "empty context needs explicit candidates");

  std::vector<WordId> candidates;
  std::vector<std::string> names;
  if (request.candidates) {
    for (const auto& w : *request.candidates) {
      candidates.push_back(model_.vocab.id(w));
      names.push_back(w);
    }
  } else {
    candidates = open_candidates_;
    for (const WordId id : candidates) names.push_back(model_.vocab.word(id));
  }
  if (candidates.empty()) return error_reply(422, "model vocabulary is empty");

  const std::size_t history = std::min(params_.history(), model_.graphs.max_distance());
  const GapContext ctx = make_context(model_.vocab.lookup(request.before), model_.vocab.lookup(request.after),
                                      std::move(candidates), history);
  const auto ranked = predict(model_, ctx, params_, request.alpha);

  json out = json::array();
  for (std::size_t i = 0; i < ranked.size() && i < request.k; ++i) {
    const auto& r = ranked[i];
    out.push_back({{"word", names[r.index]}, {"theta", r.theta}, {"bayes", r.bayes}, {"lsa", r.lsa}});
  }
  return {200, json{{"suggestions", out},
                    {"alpha", request.alpha.value_or(params_.alpha)},
                    {"fingerprint", model_.fingerprint}}
                   .dump()};
}

HttpReply SuggestionService::health() const {
  return {200, json{{"status", "ok"},
                    {"fingerprint", model_.fingerprint},
                    {"vocabulary", model_.vocab.size()},
                    {"history", params_.history()}}
                   .dump()};
}

void install_routes(httplib::Server& server, const SuggestionService& service,
                    const std::optional<std::filesystem::path>& static_dir) {
  server.Post("/suggest", [&service](const httplib::Request& req, httplib::Response& res) {
    const HttpReply reply = service.suggest(req.body);
    res.status = reply.status;
    res.set_content(reply.body, "application/json");
  });
  server.Get("/health", [&service](const httplib::Request&, httplib::Response& res) {
    const HttpReply reply = service.health();
    res.status = reply.status;
    res.set_content(reply.body, "application/json");
  });
  if (static_dir && !server.set_mount_point("/", static_dir->string()))
    throw IoError("cannot serve static files from " + static_dir->string());
}

BindAddress parse_bind_address(std::string_view text) {
  BindAddress addr;
  std::string_view port = text;
  if (const auto colon = text.rfind(':'); colon != std::string_view::npos) {
    if (colon > 0) addr.host = std::string(text.substr(0, colon));
    port = text.substr(colon + 1);
  }
  int value = 0;
  auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
  if (ec != std::errc{} || ptr != port.data() + port.size() || value < 1 || value > 65535)
    throw std::invalid_argument("bad bind address: " + std::string(text));
  addr.port = value;
  return addr;
}

void serve(const SuggestionService& service, const BindAddress& address,
           const std::optional<std::filesystem::path>& static_dir) {
  httplib::Server server;
  install_routes(server, service, static_dir);
  if (!server.listen(address.host, address.port))
    throw IoError("cannot bind " + address.host + ":" + std::to_string(address.port));
}

}  // namespace lexblend
