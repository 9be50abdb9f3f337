#include <algorithm>

#include "artic/error.hpp"
#include "artic/kinematics.hpp"
#include "artic/text_format.hpp"
#include "httplib.h"
#include "json_util.hpp"

namespace artic {

extern const char kPlacementRulesJson[];  // generated from data/placement_rules.json

using detail::json;

std::vector<PlacementRule> parse_placement_rules(std::string_view json_text) {
  const json doc = detail::parse_json(json_text);
  if (!doc.is_array()) detail::schema_error("$", "expected a list of rules");
  std::vector<PlacementRule> rules;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string path = "$[" + std::to_string(i) + "]";
    const json& r = doc[i];
    detail::check_keys(r, path, {"object_label", "target_labels", "surface"});
    PlacementRule rule;
    rule.object_label = detail::as_string(detail::require(r, path, "object_label"), path + ".object_label");
    const json& targets = detail::require(r, path, "target_labels");
    if (!targets.is_array() || targets.empty())
      detail::schema_error(path + ".target_labels", "expected a non-empty list");
    for (std::size_t k = 0; k < targets.size(); ++k)
      rule.target_labels.push_back(
          detail::as_string(targets[k], path + ".target_labels[" + std::to_string(k) + "]"));
    const std::string surface = detail::as_string(detail::require(r, path, "surface"), path + ".surface");
    try {
      rule.surface = surface_from_string(surface);
    } catch (const Error& e) {
      detail::schema_error(path + ".surface", e.what());
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

const std::vector<PlacementRule>& default_placement_rules() {
  static const std::vector<PlacementRule> rules = parse_placement_rules(kPlacementRulesJson);
  return rules;
}

PlacementAdvice RuleBasedAdvisor::advise(std::string_view object_label,
                                         const std::vector<std::string>& scene_labels) const {
  for (const PlacementRule& rule : rules_) {
    if (rule.object_label != object_label) continue;
    for (const std::string& target : rule.target_labels)
      if (std::find(scene_labels.begin(), scene_labels.end(), target) != scene_labels.end())
        return {target, rule.surface};
  }
  throw PlacementError("no placement rule for '" + std::string(object_label) + "' in this scene");
}

PlacementAdvice rule_based_advisor(std::string_view object_label,
                                   const std::vector<std::string>& scene_labels) {
  return RuleBasedAdvisor().advise(object_label, scene_labels);
}

HttpPlacementAdvisor::HttpPlacementAdvisor(Options options) : options_(std::move(options)) {
  std::string_view url = options_.url;
  if (!url.starts_with("http://")) throw Error("advisor url must start with http://: " + options_.url);
  url.remove_prefix(7);
  const std::size_t slash = url.find('/');
  std::string_view authority = url.substr(0, slash);
  path_ = slash == std::string_view::npos ? "/" : std::string(url.substr(slash));
  const std::size_t colon = authority.rfind(':');
  if (colon != std::string_view::npos) {
    const std::string port(authority.substr(colon + 1));
    long long p = 0;
    if (!parse_int(port, p) || p <= 0 || p > 65535) throw Error("bad port in advisor url: " + options_.url);
    port_ = static_cast<int>(p);
    authority = authority.substr(0, colon);
  }
  if (authority.empty()) throw Error("missing host in advisor url: " + options_.url);
  host_ = std::string(authority);
}

PlacementAdvice HttpPlacementAdvisor::advise(std::string_view object_label,
                                             const std::vector<std::string>& scene_labels) const {
  auto give_up = [&](const std::string& reason) -> PlacementAdvice {
    if (options_.fallback) return options_.fallback->advise(object_label, scene_labels);
    throw PlacementError("placement advisor at " + options_.url + ": " + reason);
  };

  httplib::Client client(host_, port_);
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  client.set_write_timeout(seconds.count(), micros.count());

  const json request = {{"object_label", object_label}, {"scene_labels", scene_labels}};
  const auto response = client.Post(path_, request.dump(), "application/json");
  if (!response) return give_up("request failed (" + httplib::to_string(response.error()) + ")");
  if (response->status != 200) return give_up("HTTP status " + std::to_string(response->status));

  const json answer = json::parse(response->body, nullptr, /*allow_exceptions=*/false);
  if (!answer.is_object() || !answer.contains("target_label") || !answer.contains("surface") ||
      !answer["target_label"].is_string() || !answer["surface"].is_string())
    return give_up("response is not {target_label, surface}");
  PlacementAdvice advice;
  advice.target_label = answer["target_label"].get<std::string>();
  const std::string surface = answer["surface"].get<std::string>();
  if (surface != "horizontal" && surface != "vertical") return give_up("unknown surface '" + surface + "'");
  advice.surface = surface_from_string(surface);
  if (std::find(scene_labels.begin(), scene_labels.end(), advice.target_label) == scene_labels.end())
    return give_up("target '" + advice.target_label + "' is not in the scene");
  return advice;
}

}  // namespace artic
