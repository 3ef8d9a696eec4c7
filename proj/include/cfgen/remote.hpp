#ifndef CFGEN_REMOTE_HPP
#define CFGEN_REMOTE_HPP

#include <memory>
#include <string>

#include "cfgen/backends.hpp"

namespace httplib {
class Server;
}

namespace cfgen {

class HttpPoster;

// HTTP/JSON backend clients. Four endpoints, UTF-8 JSON bodies, numbers as
// IEEE doubles:
//   POST /score  {context, prefix: token id arrays} -> {log_probs: array}
//   POST /embed  {text} -> {vectors: array of arrays, dimension}
//   POST /ner    {text} -> {entities: [{surface, type, start, end}]}
//   POST /verify {claim, evidence: [strings]} -> {label, scores}
// Evidence items are flattened to "title\ntext" for /verify; surfaces never
// contain newlines, so presence semantics match the in-process backends.
//
// Transport failures raise BackendUnavailableError carrying the number of
// attempts made.
struct RemoteOptions {
  std::string base_url;  // e.g. "http://127.0.0.1:8080"
  int retries = 3;
  int timeout_seconds = 10;
};

// The scorer tokenizes with a locally supplied vocabulary; only the
// per-step distribution comes from the service.
class RemoteScorer : public TokenScorer {
 public:
  RemoteScorer(Vocabulary vocab, RemoteOptions options);
  const Vocabulary& vocab() const override { return vocab_; }
  std::vector<double> score_next_tokens(
      const std::vector<TokenId>& context,
      const std::vector<TokenId>& prefix) const override;
  bool concurrent_safe() const override { return false; }

 private:
  Vocabulary vocab_;
  std::shared_ptr<HttpPoster> poster_;
};

class RemoteEmbedder : public EmbeddingProvider {
 public:
  explicit RemoteEmbedder(RemoteOptions options);
  std::size_t dimension() const override { return dimension_; }
  std::vector<std::vector<double>> embed(
      const std::string& text) const override;
  bool concurrent_safe() const override { return false; }

 private:
  std::shared_ptr<HttpPoster> poster_;
  std::size_t dimension_ = 0;  // probed at construction
};

class RemoteRecognizer : public EntityRecognizer {
 public:
  explicit RemoteRecognizer(RemoteOptions options);
  std::vector<Entity> recognize(const std::string& text) const override;
  bool concurrent_safe() const override { return false; }

 private:
  std::shared_ptr<HttpPoster> poster_;
};

class RemoteVerifier : public Verifier {
 public:
  explicit RemoteVerifier(RemoteOptions options);
  VerifyResult verify(const std::string& claim,
                      const Evidence& evidence) const override;
  bool concurrent_safe() const override { return false; }

 private:
  std::shared_ptr<HttpPoster> poster_;
};

// Serves the four endpoints over the given in-process backends; used by the
// stub-server tool and the contract tests.
std::unique_ptr<httplib::Server> make_backend_server(
    std::shared_ptr<const TokenScorer> scorer,
    std::shared_ptr<const EmbeddingProvider> embedder,
    std::shared_ptr<const EntityRecognizer> recognizer,
    std::shared_ptr<const Verifier> verifier);

}  // namespace cfgen

#endif  // CFGEN_REMOTE_HPP
