#pragma once

// Quality assessments recorded in project banners on talk pages.

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qcpd/model.hpp"

namespace qcpd {

/// True for WikiProject banners, banner shells and similar assessment
/// templates (normalized name).
bool is_assessment_banner(std::string_view template_name);

/// First parseable `class=` value among assessment banners, in document order
/// (nested banners included).
std::optional<RawClass> banner_class(std::string_view wikitext);

/// One event per talk revision whose banner class differs from the last
/// class seen; revisions without a readable class are skipped.
std::vector<QualityLabelEvent> extract_quality_labels(std::span<const Revision> talk_revisions);

}  // namespace qcpd
