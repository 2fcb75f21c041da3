def execute_command(image):
    image_patch = ImagePatch(image)
    whiteboard_patches = image_patch.find('whiteboard')
    chair_patches = image_patch.find('chair')
    if len(whiteboard_patches) == 0 or len(chair_patches) == 0:
        return {'function': 'None', 'error': 'Missing whiteboard or chair.'}
    whiteboard = whiteboard_patches[0]
    chair_patches.sort(key=lambda x: distance(x, whiteboard))
    target = chair_patches[0]
    inputs = (target.horizontal_center, target.vertical_center)
    return {'function': 'navigate_to_object', 'inputs': inputs, 'box': [target.left, target.lower, target.right, target.upper]}
