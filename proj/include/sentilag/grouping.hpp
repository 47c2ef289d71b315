#pragma once

#include "sentilag/ingest.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sentilag::grouping {

struct UserProfile {
  std::string user_id;
  bool certified = false;
  std::string verify_description;
};

enum class GroupLabel { AFA, UFA };

std::string_view to_string(GroupLabel g);

/// Where posts whose author has no profile are routed.
enum class UnknownUserPolicy { AssignUfa, AssignAfa, Fail };

/// Financial keywords shipped as a replaceable default; deployments are
/// expected to supply their own list.
std::vector<std::string> default_keywords();

/// AFA iff certified and the description contains at least one keyword
/// (case-insensitive substring after NFC). Throws on an empty keyword list.
GroupLabel classify_user(const UserProfile& profile, const std::vector<std::string>& keywords);

using ProfileIndex = std::unordered_map<std::string, UserProfile>;

struct Partition {
  std::vector<ingest::PostRecord> afa;
  std::vector<ingest::PostRecord> ufa;
  std::size_t unknown_users = 0;  ///< posts whose author lacked a profile
  std::size_t afa_users = 0;
  std::size_t ufa_users = 0;
};

Partition partition_posts(const std::vector<ingest::PostRecord>& posts, const ProfileIndex& profiles,
                          const std::vector<std::string>& keywords,
                          UnknownUserPolicy policy = UnknownUserPolicy::AssignUfa);

/// Profiles JSONL: user_id, certified, verify_description. Duplicate user_id
/// is fatal.
ProfileIndex load_profiles(const std::filesystem::path& path);

/// One keyword per line; blank lines and `#` comments ignored.
std::vector<std::string> load_keywords(const std::filesystem::path& path);

}  // namespace sentilag::grouping
