#pragma once

#include "tutor/serialization.hpp"
#include "tutor/session_service.hpp"

#include <memory>
#include <string>
#include <string_view>

namespace httplib {
class Server;
}

namespace tutor {

Json view_to_json(const SessionView& view);
Json turn_result_to_json(const TurnResult& result);
Json transcript_to_json(const Transcript& transcript);
Json error_to_json(const ServiceError& error);

int http_status_for(ErrorCode code) noexcept;

struct ApiResponse {
  int status = 200;
  std::string body;  // JSON document

  Json json() const { return Json::parse(body); }
};

// The REST surface, independent of the transport:
//   POST /api/sessions                    {"topic"}                     -> 201 SessionView
//   GET  /api/sessions/{id}                                             -> 200 SessionView
//   POST /api/sessions/{id}/answer        {"answer", "question_id"?}    -> 200 TurnResult
//   POST /api/sessions/{id}/question                                    -> 200 SessionView
//   GET  /api/sessions/{id}/transcript                                  -> 200 transcript
//   GET  /api/healthz                                                   -> 200 {"status","provider"}
class ApiRouter {
public:
  explicit ApiRouter(SessionService& service) : service_(service) {}

  ApiResponse handle(std::string_view method, std::string_view path, std::string_view body) const;

  // Routes every /api request of `server` through handle().
  void mount(httplib::Server& server) const;

private:
  SessionService& service_;
};

// What the CLI (and any other front end) talks to: the REST surface either
// in-process or over HTTP.
class TutorClient {
public:
  virtual ~TutorClient() = default;
  virtual ApiResponse request(std::string_view method, std::string_view path, std::string_view body) = 0;
};

class EmbeddedClient final : public TutorClient {
public:
  explicit EmbeddedClient(std::shared_ptr<SessionService> service);
  ApiResponse request(std::string_view method, std::string_view path, std::string_view body) override;

private:
  std::shared_ptr<SessionService> service_;
  ApiRouter router_;
};

class RemoteClient final : public TutorClient {
public:
  explicit RemoteClient(std::string base_url);
  ApiResponse request(std::string_view method, std::string_view path, std::string_view body) override;

private:
  std::string base_url_;
};

}  // namespace tutor
