import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    // The end-to-end suite spawns the Python service and generates its
    // model fixture on first run.
    testTimeout: 120_000,
    hookTimeout: 120_000,
  },
});
