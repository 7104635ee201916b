import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    environment: "node",
    // the contract suite seeds a vault and boots the real service
    testTimeout: 30_000,
    hookTimeout: 180_000,
  },
});
