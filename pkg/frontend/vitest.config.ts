import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    // The end-to-end test boots the Python service and walks a full
    // 30-task session over real HTTP, so it needs generous timeouts.
    testTimeout: 60_000,
    hookTimeout: 60_000,
  },
});
