#pragma once

// gcc/toolserver.hpp — line-delimited JSON protocol over stdio, one request
// per line, one response per line, in order.
//
// Request:  {"id": <any json>, "op": "<name>", "args": {...}}
// Success:  {"id": <echoed>, "ok": true, "data": {...}}
// Failure:  {"id": <echoed>, "ok": false,
//            "error": {"code": "<ErrorCode>", "message": "..."}}
//
// The id is echoed verbatim whatever its JSON type; a line too malformed to
// extract an id from answers with id null. The server never crashes on bad
// input: every line, including empty and non-JSON lines, produces exactly
// one well-formed response.

#include <istream>
#include <ostream>
#include <string>

#include "gcc/dispatch.hpp"
#include "gcc/env.hpp"
#include "gcc/errors.hpp"
#include "gcc/json_views.hpp"

namespace gcc {

namespace detail {

inline Json error_response(const Json& id, std::string_view code,
                           std::string_view message) {
  return Json{{"id", id},
              {"ok", false},
              {"error", Json{{"code", std::string(code)},
                             {"message", std::string(message)}}}};
}

}  // namespace detail

// Handles one raw request line and always returns a well-formed response.
inline Json handle_request_line(const fs::path& root, const std::string& line,
                                const Env& env) {
  Json request = Json::value_t::discarded;
  if (!line.empty()) {
    request = Json::parse(line, /*cb=*/nullptr, /*allow_exceptions=*/false);
  }
  if (request.is_discarded() || !request.is_object()) {
    return detail::error_response(Json(nullptr), "BadRequest",
                                  "request must be a JSON object");
  }
  const Json id = request.contains("id") ? request["id"] : Json(nullptr);
  const auto op_it = request.find("op");
  if (op_it == request.end() || !op_it->is_string()) {
    return detail::error_response(id, "BadRequest", "op must be a string");
  }
  Json args = Json::object();
  const auto args_it = request.find("args");
  if (args_it != request.end() && !args_it->is_null()) {
    if (!args_it->is_object()) {
      return detail::error_response(id, "BadRequest", "args must be an object");
    }
    args = *args_it;
  }
  try {
    const Json data = dispatch_op(root, op_it->get<std::string>(), args, env);
    return Json{{"id", id}, {"ok", true}, {"data", data}};
  } catch (const Error& e) {
    return detail::error_response(id, code_name(e.code()), e.what());
  } catch (const std::exception& e) {
    return detail::error_response(id, "IoError", e.what());
  }
}

// Reads request lines until EOF, writing one response line per request.
// Responses are flushed per line so a driving process can pipeline.
inline void serve(const fs::path& root, std::istream& in, std::ostream& out,
                  const Env& env) {
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    // error_handler replace: stored bytes are not guaranteed to be UTF-8,
    // and a response must go out for every line no matter what.
    out << handle_request_line(root, line, env)
               .dump(-1, ' ', false, Json::error_handler_t::replace)
        << '\n'
        << std::flush;
  }
}

}  // namespace gcc
