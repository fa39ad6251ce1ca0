#include "holodiv/common.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace holodiv {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::DegenerateGradient: return "DegenerateGradient";
        case ErrorCode::OutsideCollar: return "OutsideCollar";
        case ErrorCode::CollarExhausted: return "CollarExhausted";
        case ErrorCode::IdenticallyZeroFiber: return "IdenticallyZeroFiber";
        case ErrorCode::BranchCollision: return "BranchCollision";
        case ErrorCode::DeflationUnstable: return "DeflationUnstable";
        case ErrorCode::DuplicateNodes: return "DuplicateNodes";
        case ErrorCode::ConfluentNodes: return "ConfluentNodes";
        case ErrorCode::SingularNodeValue: return "SingularNodeValue";
        case ErrorCode::RootNearContour: return "RootNearContour";
        case ErrorCode::BothArgumentsZero: return "BothArgumentsZero";
        case ErrorCode::IncompleteIdeal: return "IncompleteIdeal";
        case ErrorCode::UncoveredPoint: return "UncoveredPoint";
        case ErrorCode::MissingLocal: return "MissingLocal";
        case ErrorCode::PoleProximity: return "PoleProximity";
        case ErrorCode::QuadratureBudgetExceeded: return "QuadratureBudgetExceeded";
        case ErrorCode::SchemaError: return "SchemaError";
        case ErrorCode::RangeError: return "RangeError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code), detail_(detail) {}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    next.store(n);
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("HOLODIV_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<unsigned>(v);
    }
    return 1;
}

}  // namespace holodiv
