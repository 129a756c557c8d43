#pragma once

#include "vfx/core/error.hpp"
#include "vfx/dsl/ast.hpp"
#include "vfx/dsl/builtins.hpp"
#include "vfx/llm/chat.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vfx {

struct ExamplePair {
    std::string instruction;
    std::string program;
};

/// In-context template. `user_template` holds the `{PROMPT}` slot.
struct PromptBundle {
    std::string preamble;
    std::string builtin_docs;
    std::vector<ExamplePair> examples;
    std::string user_template;
};

/// Shipped template: editing-language rules, the builtin reference and ten
/// original instruction/program pairs.
PromptBundle default_prompt_bundle();

struct BuiltPrompt {
    std::vector<ChatMessage> messages;  // system, then user
    size_t rendered_length = 0;         // characters over all messages
    std::vector<std::string> warnings;
};

BuiltPrompt build_prompt(const PromptBundle& bundle, std::string_view instruction);

/// Contents of the first fenced block (an unclosed fence runs to the end); with
/// no fence, the longest line-aligned suffix that parses to a non-empty
/// program. Throws NoProgramFound.
std::string extract_code_block(std::string_view response);

struct GenerationOptions {
    std::string model = "default";
    double temperature = 0.0;
    int max_attempts = 3;
    int max_loop = dsl::kDefaultMaxLoop;
    std::optional<std::string> transcript_dir;  // attempt_N.txt written here when set
};

struct GenerationResult {
    dsl::Program program;
    std::string source;
    int attempts = 0;
    std::vector<std::string> transcripts;  // one per attempt
};

class ExhaustedAttempts : public Error {
public:
    ExhaustedAttempts(std::vector<std::string> transcripts, const std::string& last_problem);
    const std::vector<std::string>& transcripts() const noexcept { return transcripts_; }

private:
    std::vector<std::string> transcripts_;
};

/// request -> extract -> parse -> validate; a failed attempt is answered with
/// its problems and a request for a corrected program. EndpointError aborts at
/// once. Throws ExhaustedAttempts after `max_attempts` failures.
GenerationResult generate_with_repair(ChatEndpoint& endpoint, const PromptBundle& bundle,
                                      std::string_view instruction, const GenerationOptions& options = {});

/// Canned responses keyed by exact instruction text.
const std::map<std::string, std::string>& offline_corpus();
/// Throws UnknownInstruction.
std::string offline_stub(std::string_view instruction);

/// Endpoint backed by offline_stub: answers for the first user message that
/// ends with a corpus instruction. Throws UnknownInstruction otherwise.
class OfflineEndpoint : public ChatEndpoint {
public:
    ChatResponse complete(const ChatRequest& request) override;
};

}  // namespace vfx
