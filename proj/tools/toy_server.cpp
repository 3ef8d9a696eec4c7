// Stub backend service: serves the corpus-trained toy backends over the
// four-endpoint HTTP protocol, for exercising `--backend remote:<url>`.

#include <csignal>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <httplib.h>

#include "cfgen/pipeline.hpp"
#include "cfgen/remote.hpp"

int main(int argc, char** argv) {
  CLI::App app{"toy backend stub server"};
  std::string corpus_path;
  std::string host = "127.0.0.1";
  int port = 8787;
  app.add_option("--corpus", corpus_path,
                 "dataset JSONL the toy backends are built from")
      ->required();
  app.add_option("--host", host, "bind address");
  app.add_option("--port", port, "bind port");
  CLI11_PARSE(app, argc, argv);

  try {
    const std::vector<cfgen::Instance> dataset =
        cfgen::load_dataset(corpus_path);
    const cfgen::BackendSet backends = cfgen::make_backends("toy", dataset);
    auto server = cfgen::make_backend_server(
        backends.scorer, backends.embedder, backends.recognizer,
        backends.verifier);
    std::cout << "serving toy backends on http://" << host << ":" << port
              << "\n";
    if (!server->listen(host, port)) {
      std::cerr << "failed to bind " << host << ":" << port << "\n";
      return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
