#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "verbatim/corpus.hpp"
#include "verbatim/tokenize.hpp"

namespace verbatim {

enum class Role { System, User, Assistant };

std::string_view role_name(Role r);
std::optional<Role> role_from_name(std::string_view name);

struct Message {
    Role role;
    std::string content;

    bool operator==(const Message&) const = default;
};

enum class AttackId { A1, A2, A3 };

std::string_view attack_name(AttackId a);
std::optional<AttackId> attack_from_name(std::string_view name);

// Role-tagged messages forming one attack payload. The metadata fields tie
// the conversation back to its grid cell; they are not sent over the wire.
struct Conversation {
    std::vector<Message> messages;
    AttackId attack_id = AttackId::A1;
    std::string article_id;
    std::optional<std::size_t> prefix_tokens;  // engaged only for A3

    std::uint64_t digest() const;
};

// Message-ordering and pacing constraints of one provider.
struct ProviderConstraints {
    bool user_first = false;
    bool supports_system_role = true;
    unsigned rate_limit = 60;  // requests per window
    std::chrono::milliseconds rate_window{60000};
    unsigned max_in_flight = 4;
};

// Attack conversation templates. Blocks of role-tagged text with a {title}
// placeholder; the shipped files under data/templates are the defaults and
// builtin() carries the same text so the library works without them.
struct AttackTemplates {
    std::vector<Message> attack1;
    std::vector<Message> attack2;
    std::vector<Message> attack3;  // A3 appends the article prefix to these
    std::string user_first_filler = "Get it?";

    static const AttackTemplates& builtin();
    static AttackTemplates load_dir(const std::string& dir);

    std::uint64_t digest() const;
};

struct BuiltAttack {
    Conversation conversation;
    std::string expected_completion;
};

// Instantiates one attack against an article. prefix_tokens must be
// engaged exactly for A3. Throws TextTooShort (via take_prefix) when the
// article cannot supply the prefix, Error on a contract violation.
BuiltAttack build_attack(AttackId attack, const Article& article,
                         std::optional<std::size_t> prefix_tokens, const TokenizerSpec& spec,
                         const AttackTemplates& templates = AttackTemplates::builtin());

// Inserts the user filler before a leading assistant turn when the
// provider requires user-first ordering; otherwise returns conv unchanged.
Conversation adapt_for_provider(Conversation conv, const ProviderConstraints& constraints,
                                const AttackTemplates& templates = AttackTemplates::builtin());

// Parses one template file (blocks introduced by @system/@user/@assistant
// lines). Exposed for tests.
std::vector<Message> parse_template_blocks(const std::string& path, std::string_view content);

}  // namespace verbatim
