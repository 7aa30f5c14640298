#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lexblend/inference.hpp"
#include "lexblend/model.hpp"

namespace httplib {
class Server;
}

namespace lexblend {

inline constexpr std::size_t kDefaultOpenVocabulary = 2000;
inline constexpr std::size_t kDefaultSuggestions = 5;

struct SuggestRequest {
  std::vector<std::string> before;  // text order
  std::vector<std::string> after;   // text order
  std::size_t k = kDefaultSuggestions;
  std::optional<std::vector<std::string>> candidates;
  std::optional<double> alpha;
};

struct HttpReply {
  int status = 200;
  std::string body;  // JSON document
};

// Stateless request handling over one immutable model. Without explicit
// candidates, the top `open_vocabulary` words by prior are ranked.
class SuggestionService {
 public:
  SuggestionService(Model model, ModelParams params,
                    std::size_t open_vocabulary = kDefaultOpenVocabulary);

  // 400 for malformed bodies, 422 for an empty context without candidates.
  HttpReply suggest(std::string_view json_body) const;
  HttpReply suggest(const SuggestRequest& request) const;
  HttpReply health() const;

  const Model& model() const noexcept { return model_; }
  const ModelParams& params() const noexcept { return params_; }

 private:
  Model model_;
  ModelParams params_;
  std::vector<WordId> open_candidates_;
};

// Registers POST /suggest and GET /health, plus static files under GET /
// when `static_dir` is given.
void install_routes(httplib::Server& server, const SuggestionService& service,
                    const std::optional<std::filesystem::path>& static_dir = std::nullopt);

struct BindAddress {
  std::string host = "127.0.0.1";
  int port = 8080;
};

// Parses "host:port", ":port" or "port". Throws std::invalid_argument.
BindAddress parse_bind_address(std::string_view text);

// Blocks serving until the process is stopped.
void serve(const SuggestionService& service, const BindAddress& address,
           const std::optional<std::filesystem::path>& static_dir = std::nullopt);

}  // namespace lexblend
