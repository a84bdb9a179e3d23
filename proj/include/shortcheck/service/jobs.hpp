#pragma once

#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace shortcheck::service {

enum class JobState { queued, running, done, failed };

std::string_view to_string(JobState state);

struct JobInfo {
    std::string id;
    std::string video_id;
    JobState state = JobState::queued;
    std::optional<std::string> error;
};

/// Bounded worker pool with a FIFO queue. At most one job per key (the video
/// id) may be queued or running at a time.
class JobQueue {
public:
    explicit JobQueue(int workers);
    ~JobQueue(); // finishes queued and running jobs, then joins the workers
    JobQueue(const JobQueue&) = delete;
    JobQueue& operator=(const JobQueue&) = delete;

    struct Submitted {
        std::string job_id;
        bool duplicate = false; // job_id names the job already in flight
    };

    // A task that throws marks its job failed with the exception message.
    Submitted submit(const std::string& video_id, std::function<void()> task);

    [[nodiscard]] std::optional<JobInfo> get(const std::string& job_id) const;

    // Blocks until nothing is queued or running.
    void wait_idle();

private:
    void worker();

    mutable std::mutex mutex_;
    std::condition_variable work_cv_;
    std::condition_variable idle_cv_;
    std::deque<std::pair<std::string, std::function<void()>>> queue_;
    std::map<std::string, JobInfo> jobs_;
    std::map<std::string, std::string> in_flight_; // video id -> job id
    std::vector<std::thread> threads_;
    unsigned long next_id_ = 1;
    int busy_ = 0;
    bool stopping_ = false;
};

} // namespace shortcheck::service
