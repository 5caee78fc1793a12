#include "tutor/api.hpp"

#include <httplib.h>

#include <vector>

namespace tutor {

namespace {

Json optional_question(const std::optional<Question>& q) {
  return q ? redacted_question_to_json(*q) : Json(nullptr);
}

ApiResponse respond(int status, const Json& body) { return {status, body.dump()}; }

ApiResponse error_response(int status, std::string_view code, const std::string& message) {
  Json j;
  j["error"] = {{"code", code}, {"message", message}};
  return respond(status, j);
}

std::vector<std::string_view> split_path(std::string_view path) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (start < path.size()) {
    auto slash = path.find('/', start);
    if (slash == std::string_view::npos) slash = path.size();
    if (slash > start) parts.push_back(path.substr(start, slash - start));
    start = slash + 1;
  }
  return parts;
}

struct BadRequest : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Json parse_body(std::string_view body) {
  auto j = Json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw BadRequest("request body must be a JSON object");
  return j;
}

std::string required_string(const Json& body, const char* key) {
  if (!body.contains(key) || !body[key].is_string()) {
    throw BadRequest(std::string("field '") + key + "' must be a string");
  }
  return body[key].get<std::string>();
}

}  // namespace

Json view_to_json(const SessionView& view) {
  Json j;
  j["session_id"] = view.session_id;
  j["topic"] = view.topic;
  j["pending_question"] = optional_question(view.pending_question);
  j["difficulty"] = view.difficulty.value();
  j["phase"] = to_string(view.phase);
  j["turn_count"] = view.turn_count;
  return j;
}

Json turn_result_to_json(const TurnResult& result) {
  Json j;
  j["evaluation"] = evaluation_to_json(result.evaluation);
  if (result.next_question) {
    j["next"] = {{"type", "question"}, {"question", redacted_question_to_json(*result.next_question)}};
  } else {
    j["next"] = {{"type", "mastery"}};
  }
  j["difficulty_after"] = result.difficulty_after.value();
  j["phase_after"] = to_string(result.phase_after);
  return j;
}

Json transcript_to_json(const Transcript& transcript) {
  Json j;
  j["session_id"] = transcript.session_id;
  j["topic"] = transcript.topic;
  Json turns = Json::array();
  for (const auto& turn : transcript.turns) turns.push_back(turn_to_json(turn));
  j["turns"] = std::move(turns);
  j["pending_question"] = optional_question(transcript.pending_question);
  Json events = Json::array();
  for (const auto& meta : transcript.events) {
    events.push_back({{"index", meta.index}, {"type", meta.type}, {"at", meta.at}});
  }
  j["events"] = std::move(events);
  return j;
}

Json error_to_json(const ServiceError& error) {
  Json inner;
  inner["code"] = to_string(error.code);
  inner["message"] = error.what();
  if (error.failure) inner["failure"] = failure_to_json(*error.failure);
  if (!error.session_id.empty()) inner["session_id"] = error.session_id;
  Json j;
  j["error"] = std::move(inner);
  return j;
}

int http_status_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Validation:
    case ErrorCode::EmptyAnswer:
    case ErrorCode::InvalidAnswer:
      return 422;
    case ErrorCode::UnknownSession:
      return 404;
    case ErrorCode::NoPendingQuestion:
    case ErrorCode::QuestionPending:
    case ErrorCode::Conflict:
      return 409;
    case ErrorCode::ProviderUnavailable:
    case ErrorCode::GenerationUnparseable:
    case ErrorCode::EvaluationUnparseable:
      return 502;
    case ErrorCode::ExhaustedDomains:
    case ErrorCode::Internal:
      return 500;
  }
  return 500;
}

ApiResponse ApiRouter::handle(std::string_view method, std::string_view path, std::string_view body) const {
  const auto parts = split_path(path);
  if (parts.size() < 2 || parts[0] != "api") return error_response(404, "NotFound", "no such route");

  auto allow = [&](std::string_view expected) { return method == expected; };
  try {
    if (parts.size() == 2 && parts[1] == "healthz") {
      if (!allow("GET")) return error_response(405, "MethodNotAllowed", "use GET");
      return respond(200, Json{{"status", "ok"}, {"provider", service_.provider().id()}});
    }
    if (parts[1] != "sessions") return error_response(404, "NotFound", "no such route");

    if (parts.size() == 2) {
      if (!allow("POST")) return error_response(405, "MethodNotAllowed", "use POST");
      const auto request = parse_body(body);
      return respond(201, view_to_json(service_.create_session(required_string(request, "topic"))));
    }

    const std::string id(parts[2]);
    if (parts.size() == 3) {
      if (!allow("GET")) return error_response(405, "MethodNotAllowed", "use GET");
      return respond(200, view_to_json(service_.get_session(id)));
    }
    if (parts.size() == 4 && parts[3] == "answer") {
      if (!allow("POST")) return error_response(405, "MethodNotAllowed", "use POST");
      const auto request = parse_body(body);
      std::optional<std::string> question_id;
      if (request.contains("question_id") && !request["question_id"].is_null()) {
        question_id = required_string(request, "question_id");
      }
      return respond(200, turn_result_to_json(
                              service_.submit_answer(id, required_string(request, "answer"), question_id)));
    }
    if (parts.size() == 4 && parts[3] == "question") {
      if (!allow("POST")) return error_response(405, "MethodNotAllowed", "use POST");
      return respond(200, view_to_json(service_.retry_question(id)));
    }
    if (parts.size() == 4 && parts[3] == "transcript") {
      if (!allow("GET")) return error_response(405, "MethodNotAllowed", "use GET");
      return respond(200, transcript_to_json(service_.get_transcript(id)));
    }
    return error_response(404, "NotFound", "no such route");
  } catch (const ServiceError& err) {
    return respond(http_status_for(err.code), error_to_json(err));
  } catch (const BadRequest& err) {
    return error_response(400, "BadRequest", err.what());
  } catch (const std::exception& err) {
    return error_response(500, "Internal", err.what());
  }
}

void ApiRouter::mount(httplib::Server& server) const {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    auto response = handle(req.method, req.path, req.body);
    res.status = response.status;
    res.set_content(response.body, "application/json");
  };
  server.Get(R"(/api/.*)", handler);
  server.Post(R"(/api/.*)", handler);
  server.Put(R"(/api/.*)", handler);
  server.Patch(R"(/api/.*)", handler);
  server.Delete(R"(/api/.*)", handler);
}

EmbeddedClient::EmbeddedClient(std::shared_ptr<SessionService> service)
    : service_(std::move(service)), router_(*service_) {}

ApiResponse EmbeddedClient::request(std::string_view method, std::string_view path, std::string_view body) {
  return router_.handle(method, path, body);
}

RemoteClient::RemoteClient(std::string base_url) : base_url_(std::move(base_url)) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

ApiResponse RemoteClient::request(std::string_view method, std::string_view path, std::string_view body) {
  httplib::Client client(base_url_);
  client.set_read_timeout(120, 0);
  const std::string target(path);
  httplib::Result res = method == "GET" ? client.Get(target)
                                        : client.Post(target, std::string(body), "application/json");
  if (!res) throw std::runtime_error("cannot reach tutor server at " + base_url_ + ": " + httplib::to_string(res.error()));
  return {res->status, res->body};
}

}  // namespace tutor
