// HTTP front end for the session service.

#include "tutor/api.hpp"
#include "tutor/config.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <csignal>
#include <iostream>

namespace {

httplib::Server* g_server = nullptr;

void stop(int) {
  if (g_server != nullptr) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive tutor REST server"};
  std::string config_file;
  std::string listen;
  std::string script;
  std::string data_dir;
  app.add_option("--config", config_file, "Key-value config file");
  app.add_option("--listen", listen, "host:port (overrides the config)");
  app.add_option("--script", script, "Use the scripted provider with this script");
  app.add_option("--data-dir", data_dir, "Directory for session event logs");
  CLI11_PARSE(app, argc, argv);

  try {
    tutor::TutorConfig config = config_file.empty() ? tutor::TutorConfig{} : tutor::load_config(config_file);
    tutor::apply_environment(config);
    if (!script.empty()) {
      config.provider = tutor::ProviderKind::Scripted;
      config.script_path = script;
    }
    if (!data_dir.empty()) config.data_dir = data_dir;
    if (!listen.empty()) {
      auto colon = listen.rfind(':');
      if (colon == std::string::npos) throw std::invalid_argument("--listen must be host:port");
      config.listen_host = listen.substr(0, colon);
      config.listen_port = std::stoi(listen.substr(colon + 1));
    }

    auto service = tutor::make_service(config);
    tutor::ApiRouter router(*service);
    httplib::Server server;
    router.mount(server);
    if (config.static_dir && !server.set_mount_point("/", config.static_dir->string())) {
      throw std::runtime_error("static directory " + config.static_dir->string() + " not found");
    }
    g_server = &server;
    std::signal(SIGINT, stop);
    std::signal(SIGTERM, stop);
    std::cerr << "tutor-server listening on " << config.listen_host << ":" << config.listen_port << " (provider "
              << service->provider().id() << ")\n";
    if (!server.listen(config.listen_host, config.listen_port)) {
      std::cerr << "error: cannot listen on " << config.listen_host << ":" << config.listen_port << "\n";
      return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
