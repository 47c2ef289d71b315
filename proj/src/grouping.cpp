#include "sentilag/grouping.hpp"

#include "sentilag/csv.hpp"
#include "sentilag/error.hpp"
#include "sentilag/text.hpp"

#include <json.hpp>

#include <fstream>
#include <set>

namespace sentilag::grouping {

using json = nlohmann::json;

std::string_view to_string(GroupLabel g) { return g == GroupLabel::AFA ? "AFA" : "UFA"; }

std::vector<std::string> default_keywords() {
  return {"证券", "基金", "投资顾问", "分析师", "财经", "金融", "期货", "投资",
          "financial", "securities", "analyst", "investment", "fund manager"};
}

namespace {

std::vector<std::string> fold_all(const std::vector<std::string>& keywords) {
  std::vector<std::string> folded;
  folded.reserve(keywords.size());
  for (const auto& k : keywords) {
    std::string f = text::fold(text::clean(k));
    if (!f.empty()) {
      folded.push_back(std::move(f));
    }
  }
  if (folded.empty()) {
    throw Error("keyword list is empty");
  }
  return folded;
}

GroupLabel classify_folded(const UserProfile& profile, const std::vector<std::string>& folded) {
  if (!profile.certified) {
    return GroupLabel::UFA;
  }
  const std::string desc = text::fold(text::clean(profile.verify_description));
  for (const auto& k : folded) {
    if (desc.find(k) != std::string::npos) {
      return GroupLabel::AFA;
    }
  }
  return GroupLabel::UFA;
}

}  // namespace

GroupLabel classify_user(const UserProfile& profile, const std::vector<std::string>& keywords) {
  return classify_folded(profile, fold_all(keywords));
}

Partition partition_posts(const std::vector<ingest::PostRecord>& posts, const ProfileIndex& profiles,
                          const std::vector<std::string>& keywords, UnknownUserPolicy policy) {
  const auto folded = fold_all(keywords);
  std::unordered_map<std::string, GroupLabel> memo;
  std::set<std::string> afa_users;
  std::set<std::string> ufa_users;
  Partition out;
  for (const auto& p : posts) {
    auto it = memo.find(p.user_id);
    if (it == memo.end()) {
      const auto prof = profiles.find(p.user_id);
      GroupLabel g = GroupLabel::UFA;
      if (prof != profiles.end()) {
        g = classify_folded(prof->second, folded);
      } else if (policy == UnknownUserPolicy::Fail) {
        throw Error("post " + p.post_id + " has unknown user_id '" + p.user_id + "'");
      } else {
        g = policy == UnknownUserPolicy::AssignAfa ? GroupLabel::AFA : GroupLabel::UFA;
      }
      it = memo.emplace(p.user_id, g).first;
    }
    if (!profiles.count(p.user_id)) {
      ++out.unknown_users;
    }
    if (it->second == GroupLabel::AFA) {
      out.afa.push_back(p);
      afa_users.insert(p.user_id);
    } else {
      out.ufa.push_back(p);
      ufa_users.insert(p.user_id);
    }
  }
  out.afa_users = afa_users.size();
  out.ufa_users = ufa_users.size();
  return out;
}

ProfileIndex load_profiles(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open " + path.string());
  }
  ProfileIndex index;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (csv::trim(line).empty()) {
      continue;
    }
    UserProfile prof;
    try {
      const json obj = json::parse(line);
      prof.user_id = obj.at("user_id").get<std::string>();
      const json& cert = obj.at("certified");
      if (!cert.is_boolean()) {
        throw Error("certified must be a boolean");
      }
      prof.certified = cert.get<bool>();
      const json& desc = obj.at("verify_description");
      prof.verify_description = desc.is_null() ? std::string() : desc.get<std::string>();
    } catch (const json::exception& e) {
      throw FormatError(path.string(), lineno, e.what());
    } catch (const Error& e) {
      throw FormatError(path.string(), lineno, e.what());
    }
    if (!index.emplace(prof.user_id, prof).second) {
      throw FormatError(path.string(), lineno, "duplicate user_id '" + prof.user_id + "'");
    }
  }
  return index;
}

std::vector<std::string> load_keywords(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open " + path.string());
  }
  std::vector<std::string> keywords;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = csv::trim(line);
    if (t.empty() || t.front() == '#') {
      continue;
    }
    keywords.push_back(t);
  }
  if (keywords.empty()) {
    throw Error(path.string() + ": no keywords");
  }
  return keywords;
}

}  // namespace sentilag::grouping
