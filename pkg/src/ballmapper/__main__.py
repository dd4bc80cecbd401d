from ballmapper.cli import main

raise SystemExit(main())
