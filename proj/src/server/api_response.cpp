#include "mobility/server/api_response.hpp"

#include <json.hpp>
#include <stdexcept>

namespace mobility::server {

std::string ApiResponse::to_json() const {
  nlohmann::ordered_json j;
  j["success"] = success;
  j["message"] = message;
  return j.dump();
}

ApiResponse ApiResponse::parse(std::string_view body) {
  const auto j = nlohmann::json::parse(body.begin(), body.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object() || j.size() != 2 || !j.contains("success") || !j.contains("message") ||
      !j["success"].is_number_integer() || !j["message"].is_string()) {
    throw std::invalid_argument("not a response envelope");
  }
  return {j["success"].get<int>(), j["message"].get<std::string>()};
}

}  // namespace mobility::server
