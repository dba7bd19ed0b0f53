#pragma once

// Private helper shared by the HTTP-speaking providers. Not installed.

#include <memory>
#include <string>

#include "httplib.h"
#include "right/errors.hpp"

namespace right {

struct HttpEndpoint {
  std::string scheme;  // "http" or "https"
  std::string host;
  int port = 0;
  std::string path;  // always starts with '/'
};

inline HttpEndpoint parse_http_endpoint(const std::string& url) {
  HttpEndpoint ep;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint '" + url + "' lacks a scheme");
  ep.scheme = url.substr(0, scheme_end);
  if (ep.scheme != "http" && ep.scheme != "https") throw ConfigError("endpoint '" + url + "': unsupported scheme");
  const auto rest = url.substr(scheme_end + 3);
  const auto slash = rest.find('/');
  const std::string authority = rest.substr(0, slash);
  ep.path = slash == std::string::npos ? "/" : rest.substr(slash);
  const auto colon = authority.rfind(':');
  if (colon != std::string::npos && authority.find(']') == std::string::npos) {
    ep.host = authority.substr(0, colon);
    try {
      ep.port = std::stoi(authority.substr(colon + 1));
    } catch (const std::exception&) {
      throw ConfigError("endpoint '" + url + "': bad port");
    }
  } else {
    ep.host = authority;
    ep.port = ep.scheme == "https" ? 443 : 80;
  }
  if (ep.host.empty()) throw ConfigError("endpoint '" + url + "': empty host");
  return ep;
}

inline std::unique_ptr<httplib::Client> make_http_client(const HttpEndpoint& ep) {
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (ep.scheme == "https") throw ConfigError("https endpoints need a build with OpenSSL");
#endif
  auto client = std::make_unique<httplib::Client>(ep.scheme + "://" + ep.host + ":" + std::to_string(ep.port));
  client->set_connection_timeout(10, 0);
  client->set_read_timeout(120, 0);
  return client;
}

}  // namespace right
