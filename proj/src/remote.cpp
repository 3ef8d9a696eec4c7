#include "cfgen/remote.hpp"

#include <functional>
#include <mutex>

#include <httplib.h>
#include <json.hpp>

#include "cfgen/errors.hpp"

namespace cfgen {

using nlohmann::json;

// One keep-alive connection per backend object, rebuilt after a transport
// failure. Calls are serialized internally; the backends still declare
// themselves unsafe for concurrent use so the pipeline spaces them out.
class HttpPoster {
 public:
  explicit HttpPoster(RemoteOptions options) : options_(std::move(options)) {}

  json post(const std::string& path, const json& body) {
    const std::string payload = body.dump();
    std::lock_guard<std::mutex> lock(mutex_);
    int attempts = 0;
    std::string last_error;
    for (int attempt = 0; attempt <= options_.retries; ++attempt) {
      ++attempts;
      if (!client_) {
        client_ = std::make_unique<httplib::Client>(options_.base_url);
        client_->set_connection_timeout(options_.timeout_seconds, 0);
        client_->set_read_timeout(options_.timeout_seconds, 0);
        client_->set_keep_alive(true);
      }
      auto result = client_->Post(path, payload, "application/json");
      if (!result) {
        last_error = "transport error: " + httplib::to_string(result.error());
        client_.reset();
        continue;
      }
      if (result->status != 200) {
        last_error = "HTTP " + std::to_string(result->status);
        continue;
      }
      try {
        return json::parse(result->body);
      } catch (const json::parse_error& e) {
        last_error = std::string("bad JSON in response: ") + e.what();
        continue;
      }
    }
    throw BackendUnavailableError("POST " + options_.base_url + path +
                                      " failed after " +
                                      std::to_string(attempts) +
                                      " attempts: " + last_error,
                                  attempts);
  }

 private:
  RemoteOptions options_;
  std::mutex mutex_;
  std::unique_ptr<httplib::Client> client_;
};

namespace {

std::string flatten_evidence_item(const EvidenceItem& item) {
  return item.title + "\n" + item.text;
}

}  // namespace

RemoteScorer::RemoteScorer(Vocabulary vocab, RemoteOptions options)
    : vocab_(std::move(vocab)),
      poster_(std::make_shared<HttpPoster>(std::move(options))) {}

RemoteRecognizer::RemoteRecognizer(RemoteOptions options)
    : poster_(std::make_shared<HttpPoster>(std::move(options))) {}

RemoteVerifier::RemoteVerifier(RemoteOptions options)
    : poster_(std::make_shared<HttpPoster>(std::move(options))) {}

std::vector<double> RemoteScorer::score_next_tokens(
    const std::vector<TokenId>& context,
    const std::vector<TokenId>& prefix) const {
  json body;
  body["context"] = context;
  body["prefix"] = prefix;
  json reply = poster_->post("/score", body);
  std::vector<double> log_probs =
      reply.at("log_probs").get<std::vector<double>>();
  if (log_probs.size() != vocab_.size())
    throw Error("remote /score returned " + std::to_string(log_probs.size()) +
                " entries for vocabulary of " + std::to_string(vocab_.size()));
  return log_probs;
}

RemoteEmbedder::RemoteEmbedder(RemoteOptions options)
    : poster_(std::make_shared<HttpPoster>(std::move(options))) {
  json body;
  body["text"] = "dimension probe";
  json reply = poster_->post("/embed", body);
  dimension_ = reply.at("dimension").get<std::size_t>();
}

std::vector<std::vector<double>> RemoteEmbedder::embed(
    const std::string& text) const {
  json body;
  body["text"] = text;
  json reply = poster_->post("/embed", body);
  return reply.at("vectors").get<std::vector<std::vector<double>>>();
}

std::vector<Entity> RemoteRecognizer::recognize(const std::string& text) const {
  json body;
  body["text"] = text;
  json reply = poster_->post("/ner", body);
  std::vector<Entity> out;
  for (const json& e : reply.at("entities")) {
    auto etype = parse_entity_type(e.at("type").get<std::string>());
    if (!etype)
      throw Error("remote /ner returned unknown entity type: " +
                  e.at("type").get<std::string>());
    out.push_back(Entity{e.at("surface").get<std::string>(), *etype, 0,
                         Span{e.at("start").get<std::size_t>(),
                              e.at("end").get<std::size_t>()}});
  }
  return out;
}

VerifyResult RemoteVerifier::verify(const std::string& claim,
                                    const Evidence& evidence) const {
  json body;
  body["claim"] = claim;
  json items = json::array();
  for (const auto& item : evidence) items.push_back(flatten_evidence_item(item));
  body["evidence"] = items;
  json reply = poster_->post("/verify", body);

  auto label = parse_label(reply.at("label").get<std::string>());
  if (!label)
    throw Error("remote /verify returned unknown label: " +
                reply.at("label").get<std::string>());
  VerifyResult result;
  result.label = *label;
  const json& scores = reply.at("scores");
  result.scores[Label::SUP] = scores.at("SUP").get<double>();
  result.scores[Label::REF] = scores.at("REF").get<double>();
  result.scores[Label::NEI] = scores.at("NEI").get<double>();
  return result;
}

std::unique_ptr<httplib::Server> make_backend_server(
    std::shared_ptr<const TokenScorer> scorer,
    std::shared_ptr<const EmbeddingProvider> embedder,
    std::shared_ptr<const EntityRecognizer> recognizer,
    std::shared_ptr<const Verifier> verifier) {
  auto server = std::make_unique<httplib::Server>();

  auto handle = [](httplib::Response& res,
                   const std::function<json(const json&)>& fn,
                   const httplib::Request& req) {
    try {
      res.set_content(fn(json::parse(req.body)).dump(), "application/json");
    } catch (const std::exception& e) {
      res.status = 400;
      res.set_content(json{{"error", e.what()}}.dump(), "application/json");
    }
  };

  server->Post("/score", [scorer, handle](const httplib::Request& req,
                                          httplib::Response& res) {
    handle(res,
           [&scorer](const json& body) {
             auto context = body.at("context").get<std::vector<TokenId>>();
             auto prefix = body.at("prefix").get<std::vector<TokenId>>();
             json reply;
             reply["log_probs"] = score_next_tokens(*scorer, context, prefix);
             return reply;
           },
           req);
  });

  server->Post("/embed", [embedder, handle](const httplib::Request& req,
                                            httplib::Response& res) {
    handle(res,
           [&embedder](const json& body) {
             json reply;
             reply["vectors"] =
                 embedder->embed(body.at("text").get<std::string>());
             reply["dimension"] = embedder->dimension();
             return reply;
           },
           req);
  });

  server->Post("/ner", [recognizer, handle](const httplib::Request& req,
                                            httplib::Response& res) {
    handle(res,
           [&recognizer](const json& body) {
             json entities = json::array();
             for (const Entity& e :
                  recognizer->recognize(body.at("text").get<std::string>())) {
               entities.push_back({{"surface", e.surface},
                                   {"type", entity_type_name(e.etype)},
                                   {"start", e.span.start},
                                   {"end", e.span.end}});
             }
             return json{{"entities", entities}};
           },
           req);
  });

  server->Post("/verify", [verifier, handle](const httplib::Request& req,
                                             httplib::Response& res) {
    handle(res,
           [&verifier](const json& body) {
             Evidence evidence;
             for (const auto& s :
                  body.at("evidence").get<std::vector<std::string>>()) {
               evidence.push_back(EvidenceItem{"", s});
             }
             VerifyResult v =
                 verifier->verify(body.at("claim").get<std::string>(), evidence);
             json scores;
             scores["SUP"] = v.scores.at(Label::SUP);
             scores["REF"] = v.scores.at(Label::REF);
             scores["NEI"] = v.scores.at(Label::NEI);
             return json{{"label", label_name(v.label)}, {"scores", scores}};
           },
           req);
  });

  return server;
}

}  // namespace cfgen
