#pragma once

#include <string>

#include "homog/experiments.hpp"

namespace homog {

// Loads a StudyConfig from a JSON config file. See README for the schema;
// the kernel is either a named built-in or a list of Fourier terms
// [j, k, amp].
StudyConfig load_config(const std::string& path);

KernelSpec kernel_from_name(const std::string& name);

} // namespace homog
