import { defineConfig } from "vitest/config";

export default defineConfig({
  server: {
    proxy: {
      // dev server forwards API calls to a locally running triage service
      "/api": "http://127.0.0.1:8347",
    },
  },
  build: {
    outDir: "dist",
  },
  test: {
    environment: "jsdom",
    testTimeout: 30000,
    hookTimeout: 60000,
    pool: "forks",
    fileParallelism: false,
  },
});
