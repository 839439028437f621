#ifndef DURATELESS_VERSION_HPP
#define DURATELESS_VERSION_HPP

namespace durateless {

constexpr const char* kVersion = "1.0.0";
constexpr int kSpecFormatVersion = 1;
constexpr int kCsvFormatVersion = 1;

}  // namespace durateless

#endif
