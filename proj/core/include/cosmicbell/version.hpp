#pragma once

namespace cosmicbell {

const char* version();

}  // namespace cosmicbell
