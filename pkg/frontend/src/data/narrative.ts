/** Story beats, kept as data so writers can iterate without touching code.
 * One entry per level plus Shifu's milestone lines as Johnny grows. */

export interface LevelBeat {
  level: number;
  title: string;
  intro: string;
  shifuMilestone: string;
}

export const LEVEL_BEATS: LevelBeat[] = [
  {
    level: 1,
    title: "The Shallow Reeds",
    intro:
      "Johnny is the smallest fish in the pond. Shifu points at the drifting " +
      "worms: some feed you, some hook you. Look at the address on each worm " +
      "before you bite.",
    shifuMilestone: "Every big fish once squinted at their first worm.",
  },
  {
    level: 2,
    title: "The Noisy Current",
    intro:
      "Word travels fast in the pond, and loud words travel faster. Shifu " +
      "warns: a worm that shouts at you wants you to stop thinking.",
    shifuMilestone: "You are growing. So are the tricks.",
  },
  {
    level: 3,
    title: "The Masquerade Pool",
    intro:
      "Strange fish now wear familiar faces. Check who a message is really " +
      "from, and where your reply would swim off to.",
    shifuMilestone: "Trust the address, not the name tag.",
  },
  {
    level: 4,
    title: "The Tangled Weeds",
    intro:
      "Some worms hide machinery under their skin. A message carrying code " +
      "is not a plain letter; treat it with suspicion.",
    shifuMilestone: "You see through the weeds now.",
  },
  {
    level: 5,
    title: "The Deep Water",
    intro:
      "The deep worms combine every trick you have learned. Take your time, " +
      "the clock is shorter but your eyes are sharper.",
    shifuMilestone: "One more level and the pond will call you Shifu.",
  },
];

export function beatForLevel(level: number): LevelBeat {
  return (
    LEVEL_BEATS.find((b) => b.level === level) ?? {
      level,
      title: `Level ${level}`,
      intro: "New waters, same rules: look before you bite.",
      shifuMilestone: "Keep swimming.",
    }
  );
}
