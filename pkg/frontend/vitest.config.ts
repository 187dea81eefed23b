import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    // The session test drives a real serve process end to end.
    testTimeout: 120_000,
    hookTimeout: 120_000,
  },
});
