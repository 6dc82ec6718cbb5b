#pragma once

// HTTP client for an entity-linking endpoint that speaks the Spotlight
// annotate protocol (GET <endpoint>?text=...&confidence=... with
// Accept: application/json, response in the same JSON shape the file
// ingester reads). Kept in its own header so the socket machinery is only
// compiled where it is actually used; the file-based path in kg.hpp has no
// network dependency.
//
// The endpoint comes from the argument or, when that is empty, from the
// PHARMTAG_SPOTLIGHT_URL environment variable.

#include <cstdlib>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "pharmtag/error.hpp"
#include "pharmtag/kg.hpp"

namespace pharmtag::kg {

inline const char* kSpotlightUrlEnvVar = "PHARMTAG_SPOTLIGHT_URL";

inline std::string url_encode(std::string_view s) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  out.reserve(s.size() * 3 / 2);
  for (const char c : s) {
    const auto u = static_cast<unsigned char>(c);
    const bool plain = (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z') ||
                       (u >= '0' && u <= '9') || c == '-' || c == '_' || c == '.' || c == '~';
    if (plain) {
      out += c;
    } else {
      out += '%';
      out += hex[u >> 4];
      out += hex[u & 0xF];
    }
  }
  return out;
}

namespace detail {

// "http://host:port/some/base" -> ("http://host:port", "/some/base")
inline std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
  const auto scheme = endpoint.find("://");
  if (scheme == std::string::npos)
    throw error("spotlight endpoint must be an absolute URL: " + endpoint);
  const auto slash = endpoint.find('/', scheme + 3);
  if (slash == std::string::npos) return {endpoint, "/"};
  return {endpoint.substr(0, slash), endpoint.substr(slash)};
}

}  // namespace detail

inline std::string spotlight_endpoint_from_env() {
  const char* url = std::getenv(kSpotlightUrlEnvVar);
  return url ? url : "";
}

// Annotates one text via the remote endpoint and returns the same structure
// ingest_spotlight produces from a file.
inline SpotlightIngest fetch_spotlight(const std::string& text, std::string endpoint,
                                       double confidence = 0.5,
                                       const std::map<std::string, std::string>& prefixes =
                                           default_namespaces()) {
  if (endpoint.empty()) endpoint = spotlight_endpoint_from_env();
  if (endpoint.empty())
    throw error(std::string("no spotlight endpoint configured (set ") + kSpotlightUrlEnvVar +
                " or pass a URL)");
  const auto [base, path] = detail::split_endpoint(endpoint);
  httplib::Client client(base);
  client.set_connection_timeout(10);
  client.set_read_timeout(30);
  char conf[32];
  std::snprintf(conf, sizeof(conf), "%g", confidence);
  const std::string query = path + "?text=" + url_encode(text) + "&confidence=" + conf;
  const httplib::Result res = client.Get(query, {{"Accept", "application/json"}});
  if (!res)
    throw error("spotlight request to " + endpoint + " failed: " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw error("spotlight request to " + endpoint + " returned HTTP " +
                std::to_string(res->status));
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw error("spotlight response from " + endpoint + " is not JSON: " + e.what());
  }
  return parse_spotlight(j, endpoint, prefixes);
}

}  // namespace pharmtag::kg
