# services/resource_monitor.py
import psutil
import os


class ResourceMonitor:
    def __init__(self):
        """Initializes the monitor and establishes a baseline for CPU usage."""
        self.process = psutil.Process(os.getpid())
        # The first call to cpu_percent returns 0.0, this initializes it.
        self.process.cpu_percent(interval=None)
        self.peak_memory_mb = self.get_memory_usage_mb()

    def get_memory_usage_mb(self) -> float:
        """Returns the current RAM usage (RSS) in megabytes."""
        memory_bytes = self.process.memory_info().rss
        return memory_bytes / (1024 * 1024)

    def get_cpu_usage_percent(self) -> float:
        """CPU usage since the last call, as a percentage."""
        return self.process.cpu_percent(interval=None)

    def get_thread_count(self) -> int:
        return self.process.num_threads()

    def sample(self) -> dict:
        """Takes one reading and updates the peak RSS seen so far."""
        memory_mb = self.get_memory_usage_mb()
        self.peak_memory_mb = max(self.peak_memory_mb, memory_mb)
        return {
            "memory_mb": memory_mb,
            "peak_memory_mb": self.peak_memory_mb,
            "cpu_percent": self.get_cpu_usage_percent(),
            "threads": self.get_thread_count(),
        }
