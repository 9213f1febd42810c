#pragma once

#include <optional>
#include <string_view>

// Generated at configure time from assets/prompts.
namespace hisqa::assets {

std::string_view qa_general_template();
std::string_view judge_template();
std::optional<std::string_view> task_block(std::string_view subtask);

}  // namespace hisqa::assets
