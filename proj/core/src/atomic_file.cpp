#include "segkit/atomic_file.hpp"

#include "segkit/error.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

namespace segkit {

namespace {

std::filesystem::path temp_sibling(std::filesystem::path const& path) {
    static std::atomic<unsigned long> counter{0};
    auto const tid = std::hash<std::thread::id>{}(std::this_thread::get_id());
    auto name = path.filename().string() + ".tmp." + std::to_string(tid % 100000) + "." +
                std::to_string(counter.fetch_add(1));
    return path.parent_path() / name;
}

} // namespace

void write_atomic_with(std::filesystem::path const& path,
                       std::function<void(std::filesystem::path const&)> const& writer) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    auto const tmp = temp_sibling(path);
    try {
        writer(tmp);
        std::filesystem::rename(tmp, path);
    } catch (...) {
        std::error_code ec;
        std::filesystem::remove(tmp, ec);
        throw;
    }
}

void write_file_atomic(std::filesystem::path const& path, std::span<std::byte const> contents) {
    write_atomic_with(path, [&](std::filesystem::path const& tmp) {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot open '" + tmp.string() + "' for writing");
        }
        out.write(reinterpret_cast<char const*>(contents.data()),
                  static_cast<std::streamsize>(contents.size()));
        out.close();
        if (!out) {
            throw Error("failed writing '" + tmp.string() + "'");
        }
    });
}

void write_file_atomic(std::filesystem::path const& path, std::string_view contents) {
    write_file_atomic(path, std::as_bytes(std::span<char const>(contents.data(), contents.size())));
}

std::string read_text_file(std::filesystem::path const& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw LoadError("cannot open '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace segkit
